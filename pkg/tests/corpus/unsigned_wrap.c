extern unsigned int __VERIFIER_nondet_uint(void);
void reach_error() {}

int main() {
  unsigned int x = __VERIFIER_nondet_uint();
  unsigned int y = x + 100;
  if (y < x && y == 42)
    reach_error();
  return 0;
}
