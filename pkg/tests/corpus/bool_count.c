extern _Bool __VERIFIER_nondet_bool(void);
void reach_error() {}

int main() {
  int count = 0;
  while (__VERIFIER_nondet_bool()) {
    count++;
    if (count > 20)
      break;
  }
  if (count == 10)
    reach_error();
  return 0;
}
