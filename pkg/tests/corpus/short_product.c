extern short __VERIFIER_nondet_short(void);
void reach_error() {}

int main() {
  short s = __VERIFIER_nondet_short();
  int t = s * 3;
  if (t == 771) {
    reach_error();
  } else if (t < 0) {
    return 1;
  }
  return 0;
}
