#include <cstdio>

int main() {
  std::puts("conelab: CLI not wired yet");
  return 1;
}
