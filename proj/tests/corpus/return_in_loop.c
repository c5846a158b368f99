#include <stdio.h>

#define N 200

int a[N];

int find(int key) {
  for (int i = 0; i < N; i++)
    if (a[i] == key)
      return i;
  return -1;
}

int main(void) {
  for (int i = 0; i < N; i++)
    a[i] = (i * 17) % 251;
  printf("%d %d %d\n", find(34), find(0), find(999));
  return 0;
}
