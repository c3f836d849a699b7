#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ffgap/interaction.hpp"
#include "ffgap/lattice.hpp"
#include "ffgap/operators.hpp"

namespace ffgap {

// %.17g, enough digits to round-trip a double.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(const std::string& x);
  CsvWriter& empty();
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
  void separator();
};

// {"dimension": D, "c_gamma": C, "coordinates": [[...], ...], "edges": [[i, j], ...]}
EmbeddedGraph graph_from_json(const std::string& text);
std::string graph_to_json(const EmbeddedGraph& g);

// {"local_dim": d, "range": R, "terms": [{"support": [...], "re": [[...]], "im": [[...]]}]}
// "im" may be omitted for real terms.
Interaction interaction_from_json(const std::string& text);
std::string interaction_to_json(const Interaction& phi);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// "row col re im" per structural nonzero, 0-based, preceded by "# dim N nnz M".
void write_triplets(const GlobalOperator& h, std::ostream& out);

}  // namespace ffgap
