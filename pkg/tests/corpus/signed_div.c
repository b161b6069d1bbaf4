extern int __VERIFIER_nondet_int(void);
void reach_error() {}

int main() {
  int x = __VERIFIER_nondet_int();
  int d = __VERIFIER_nondet_int();
  if (d == 0)
    return 0;
  if (x / d == -7 && x % d == -2 && d > 3)
    reach_error();
  return 0;
}
