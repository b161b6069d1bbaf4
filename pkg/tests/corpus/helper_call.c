extern int __VERIFIER_nondet_int(void);
void reach_error() {}

int mix(int a, int b) {
  int r = a * 3 - b;
  if (r < 0)
    r = -r;
  return r % 1000;
}

int main() {
  int p = __VERIFIER_nondet_int();
  int q = __VERIFIER_nondet_int();
  if (p > 0 && p < 100000 && q > 0 && mix(p, q) == 733)
    reach_error();
  return 0;
}
