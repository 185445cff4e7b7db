#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "d2dsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return d2d::runAndEmit(d2d::parseConfig(args));
    } catch (const d2d::HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const d2d::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
