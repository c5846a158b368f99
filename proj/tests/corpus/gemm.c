#include <stdio.h>

#define N 48

double A[N][N], B[N][N], C[N][N];

void init(void) {
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) {
      A[i][j] = (double)((i * 13 + j * 5) % 17) / 4.0;
      B[i][j] = (double)((i * 3 + j * 11) % 23) / 8.0;
    }
}

void gemm(void) {
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) {
      double s = 0.0;
      for (int k = 0; k < N; k++)
        s += A[i][k] * B[k][j];
      C[i][j] = s;
    }
}

int main(void) {
  init();
  gemm();
  double trace = 0.0;
  for (int i = 0; i < N; i++)
    trace += C[i][i];
  printf("%.6f\n", trace);
  return 0;
}
