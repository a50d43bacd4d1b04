#include <leafscope/leafscope.h>

#include <cstdio>

int main() {
    std::printf("%s\n", ls_version());
    return 0;
}
