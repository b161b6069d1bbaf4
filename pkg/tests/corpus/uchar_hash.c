extern unsigned char __VERIFIER_nondet_uchar(void);
void reach_error() {}

int main() {
  unsigned char h = 17;
  int i;
  for (i = 0; i < 2; i++) {
    unsigned char c = __VERIFIER_nondet_uchar();
    h = h * 31 + c;
  }
  if (h == 200)
    reach_error();
  return 0;
}
