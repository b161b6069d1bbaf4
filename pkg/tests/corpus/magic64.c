extern long long __VERIFIER_nondet_longlong(void);
void reach_error() {}

int main() {
  long long v = __VERIFIER_nondet_longlong();
  if (v == 0x123456789ABCDEFLL) {
    reach_error();
  }
  return 0;
}
