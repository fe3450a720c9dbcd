// Writes the synthetic benchmark stream: make_fixture OUT [HORIZONS DAYS SEED]
#include <fstream>
#include <iostream>
#include <string>

#include "streamasp/fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2 && argc != 5) {
    std::cerr << "usage: make_fixture OUT [HORIZONS DAYS SEED]\n";
    return 1;
  }
  std::size_t horizons = streamasp::fixtures::kBenchHorizons;
  int days = streamasp::fixtures::kBenchDays;
  std::uint64_t seed = streamasp::fixtures::kBenchSeed;
  if (argc == 5) {
    horizons = std::stoul(argv[2]);
    days = std::stoi(argv[3]);
    seed = std::stoull(argv[4]);
  }
  std::ofstream out(argv[1], std::ios::binary);
  out << streamasp::obs::format_samples_csv(streamasp::fixtures::synthetic_stream(horizons, days, seed));
  return out ? 0 : 2;
}
