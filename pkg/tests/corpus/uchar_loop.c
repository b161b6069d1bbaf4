extern unsigned char __VERIFIER_nondet_uchar(void);
void reach_error() {}

int main() {
  unsigned char n = __VERIFIER_nondet_uchar();
  int i;
  int odd = 0;
  for (i = 0; i < n; i++) {
    if (i % 2 == 1)
      odd++;
  }
  if (odd == 9 && n > 18)
    reach_error();
  return 0;
}
