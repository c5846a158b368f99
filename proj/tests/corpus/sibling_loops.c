#include <stdio.h>

#define N 300

int a[N], b[N], c[N];

void work(void) {
  for (int i = 0; i < N; i++)
    a[i] = i * 3 % 19;
  for (int i = 0; i < N; i++)
    b[i] = a[i] + i % 7;
  for (int i = 0; i < N; i++)
    c[i] = a[i] * b[i] % 255;
}

int main(void) {
  work();
  long sum = 0;
  for (int i = 0; i < N; i++)
    sum += c[i] - b[i];
  printf("%ld\n", sum);
  return 0;
}
