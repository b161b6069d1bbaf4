extern _Bool __VERIFIER_nondet_bool(void);
void reach_error() {}

int main() {
  unsigned char bits = 0;
  int i;
  for (i = 0; i < 8; i++) {
    bits = bits << 1;
    if (__VERIFIER_nondet_bool())
      bits = bits | 1;
  }
  if (bits == 0xA5)
    reach_error();
  return 0;
}
