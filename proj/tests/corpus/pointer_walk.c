#include <stdio.h>

#define N 400

double storage[N];

double sum_range(double *a, int n) {
  double s = 0.0;
  for (double *p = a; p < a + n; p++)
    s += *p;
  return s;
}

int main(void) {
  for (int i = 0; i < N; i++)
    storage[i] = (double)((i * 19) % 31) / 3.0;
  double whole = sum_range(storage, N);
  double half = sum_range(storage + N / 4, N / 2);
  printf("%.6f %.6f\n", whole, half);
  return 0;
}
