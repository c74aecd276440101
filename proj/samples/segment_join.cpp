// Joins the segments of a path one at a time through the specialized
// segment-join program, the way generated code is meant to be driven, and
// compares the result with the library's log signature.
#include <fstream>
#include <iostream>
#include <sstream>

#include "liesig/codegen.hpp"
#include "liesig/io.hpp"
#include "liesig/logsig.hpp"

int main(int argc, char** argv) {
  using namespace liesig;
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: segment_join PATH.csv [LEVEL]\n";
    return 2;
  }
  try {
    std::ifstream f(argv[1]);
    if (!f) throw std::runtime_error(std::string("cannot open ") + argv[1]);
    std::stringstream text;
    text << f.rdbuf();
    const PathPoints path = parse_path_csv(text.str());
    const int d = path.dim(), m = argc == 3 ? std::stoi(argv[2]) : 4;

    auto program = specialize_segment_join(d, m, compute_bch_table(m));
    std::vector<double> logsig(program.logsig_size(), 0.0);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto step = path.displacement(i);
      logsig = evaluate_program(program, logsig, step);
    }

    auto reference = path_logsig(path, LogSigContext::prepare(d, m), LogSigMethod::tensor);
    double worst = 0;
    for (std::size_t i = 0; i < logsig.size(); ++i) worst = std::max(worst, std::abs(logsig[i] - reference[i]));
    auto labels = lyndon_labels(reference.basis());
    for (std::size_t i = 0; i < logsig.size(); ++i) std::cout << labels[i] << '\t' << logsig[i] << '\n';
    std::cout << "max difference from tensor route: " << worst << '\n';
  } catch (const std::exception& e) {
    std::cerr << "segment_join: " << e.what() << '\n';
    return 1;
  }
}
