extern unsigned short __VERIFIER_nondet_ushort(void);
void reach_error() {}

int total = 0;

void add(int v) {
  if (v > 1000)
    total = total + v;
  else
    total = total - 1;
}

int main() {
  add(__VERIFIER_nondet_ushort());
  add(__VERIFIER_nondet_ushort());
  if (total == 65000)
    reach_error();
  return 0;
}
