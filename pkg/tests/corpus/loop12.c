extern int __VERIFIER_nondet_int(void);
void reach_error() {}

int main() {
  int sum = 0;
  int i;
  for (i = 0; i < 12; i++) {
    int v = __VERIFIER_nondet_int();
    if (v < 0 || v > 9)
      return 0;
    sum = sum + v;
  }
  if (sum == 107)
    reach_error();
  return 0;
}
