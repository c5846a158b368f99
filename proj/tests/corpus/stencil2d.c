#include <stdio.h>

#define NX 40
#define NY 40
#define STEPS 4

double grid[NX][NY];
double next_grid[NX][NY];

void init_grid(void) {
  for (int i = 0; i < NX; i++)
    for (int j = 0; j < NY; j++)
      grid[i][j] = (double)((i * 7 + j * 3) % 11);
}

void sweep(void) {
  for (int i = 1; i < NX - 1; i++)
    for (int j = 1; j < NY - 1; j++)
      next_grid[i][j] = 0.25 * (grid[i - 1][j] + grid[i + 1][j] +
                                grid[i][j - 1] + grid[i][j + 1]);
  for (int i = 1; i < NX - 1; i++)
    for (int j = 1; j < NY - 1; j++)
      grid[i][j] = next_grid[i][j];
}

int main(void) {
  init_grid();
  for (int s = 0; s < STEPS; s++)
    sweep();
  double sum = 0.0;
  for (int i = 0; i < NX; i++)
    for (int j = 0; j < NY; j++)
      sum += grid[i][j] * (1.0 + (double)((i + j) % 3));
  printf("%.6f\n", sum);
  return 0;
}
