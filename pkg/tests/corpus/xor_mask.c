extern unsigned int __VERIFIER_nondet_uint(void);
void reach_error() {}

int main() {
  unsigned int x = __VERIFIER_nondet_uint();
  unsigned int y = (x ^ 0x5A5A5A5Au) + (x << 4);
  if (y == 0x12345678u)
    reach_error();
  return 0;
}
