#include <stdio.h>

#define D 12

double cube[D][D][D];

void scale_cube(double f) {
  for (int i = 0; i < D; i++)
    for (int j = 0; j < D; j++)
      for (int k = 0; k < D; k++)
        cube[i][j][k] = f * (double)(i + 2 * j + 3 * k) + cube[i][j][k] * 0.5;
}

int main(void) {
  scale_cube(1.5);
  scale_cube(0.25);
  double sum = 0.0;
  for (int i = 0; i < D; i++)
    for (int j = 0; j < D; j++)
      for (int k = 0; k < D; k++)
        sum += cube[i][j][k];
  printf("%.6f\n", sum);
  return 0;
}
