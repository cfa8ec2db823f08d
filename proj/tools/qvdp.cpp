#include <iostream>

#include "qvdp/cli.hpp"
#include "qvdp/error.hpp"
#include "qvdp/linalg.hpp"

int main(int argc, char** argv) {
    try {
        qvdp::linalg::ensure_reliable_blas(argv);
    } catch (const qvdp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qvdp::exit_code(e.kind());
    }
    return qvdp::cli::run(argc, argv);
}
