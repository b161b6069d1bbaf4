extern int __VERIFIER_nondet_int(void);
void reach_error() {}

int main() {
  int a[4];
  int i;
  for (i = 0; i < 4; i++)
    a[i] = __VERIFIER_nondet_int();
  if (a[0] + a[1] == a[2] * 2 && a[3] == -5 && a[0] > 1000 && a[2] != 0)
    reach_error();
  return 0;
}
