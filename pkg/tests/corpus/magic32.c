extern int __VERIFIER_nondet_int(void);
void reach_error() {}

int main() {
  int x = __VERIFIER_nondet_int();
  if (x == 1234567)
    reach_error();
  return 0;
}
