#include <iostream>

int main() {
  std::cout << "bear: placeholder\n";
  return 0;
}
