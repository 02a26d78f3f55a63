#include "cli_app.hpp"

int main(int argc, char** argv)
{
    return bandframe::cli::run(argc, argv);
}
