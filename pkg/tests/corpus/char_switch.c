extern char __VERIFIER_nondet_char(void);
void reach_error() {}

int classify(char c) {
  switch (c) {
  case 'a':
  case 'e':
  case 'i':
    return 1;
  case '0':
    return 2;
  case -128:
    return 3;
  default:
    if (c > 'z')
      return 4;
    return 0;
  }
}

int main() {
  char c = __VERIFIER_nondet_char();
  int k = classify(c);
  if (k == 3)
    reach_error();
  return 0;
}
