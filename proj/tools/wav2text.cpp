#include <cstdio>
int main() { std::puts("wav2text placeholder"); return 1; }
