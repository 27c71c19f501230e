#include "nirenberg/cli.hpp"

int main(int argc, char** argv)
{
    return nirenberg::cli_dispatch(argc, argv);
}
