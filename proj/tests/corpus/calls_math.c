#include <math.h>
#include <stdio.h>

#define N 160

double in[N], out[N];

void transform(void) {
  for (int i = 0; i < N; i++)
    out[i] = sqrt(fabs(in[i])) + log(1.0 + (double)(i % 3));
}

int main(void) {
  for (int i = 0; i < N; i++)
    in[i] = (double)((i * 23) % 57) - 28.0;
  transform();
  double sum = 0.0;
  for (int i = 0; i < N; i++)
    sum += out[i];
  printf("%.6f\n", sum);
  return 0;
}
