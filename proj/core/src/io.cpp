#include "ffgap/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ffgap/error.hpp"
#include "json.hpp"

namespace ffgap {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::kParse, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad field '") + key + "': " + e.what());
  }
}

void only_keys(const json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) fail(ErrorCode::kParse, "unknown field '" + k + "'");
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ >= columns_) fail(ErrorCode::kInvalidArgument, "CSV row has too many cells");
  if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& x) {
  separator();
  if (x.find_first_of(",\"\n") == std::string::npos) {
    out_ << x;
  } else {
    out_ << '"';
    for (char c : x) out_ << (c == '"' ? "\"\"" : std::string(1, c));
    out_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::empty() {
  separator();
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) fail(ErrorCode::kInvalidArgument, "CSV row has too few cells");
  out_ << '\n';
  filled_ = 0;
}

EmbeddedGraph graph_from_json(const std::string& text) {
  const json j = parse(text);
  only_keys(j, {"dimension", "c_gamma", "coordinates", "edges"});
  const int dim = field<int>(j, "dimension");
  const double c = j.contains("c_gamma") ? field<double>(j, "c_gamma") : 1.0;
  auto coords = field<std::vector<std::vector<double>>>(j, "coordinates");
  auto edges = field<std::vector<std::pair<VertexId, VertexId>>>(j, "edges");
  return EmbeddedGraph(dim, std::move(coords), std::move(edges), c);
}

std::string graph_to_json(const EmbeddedGraph& g) {
  json j;
  j["dimension"] = g.dimension();
  j["c_gamma"] = g.c_gamma();
  json coords = json::array();
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto c = g.coordinates(v);
    coords.push_back(std::vector<double>(c.begin(), c.end()));
  }
  j["coordinates"] = coords;
  j["edges"] = g.edges();
  return j.dump(1);
}

Interaction interaction_from_json(const std::string& text) {
  const json j = parse(text);
  only_keys(j, {"local_dim", "range", "terms"});
  const int d = field<int>(j, "local_dim");
  const double range = field<double>(j, "range");
  if (!j.at("terms").is_array()) fail(ErrorCode::kParse, "'terms' must be an array");
  std::vector<InteractionTerm> terms;
  for (const auto& t : j.at("terms")) {
    only_keys(t, {"support", "re", "im"});
    const auto support = field<std::vector<VertexId>>(t, "support");
    const auto re = field<std::vector<std::vector<double>>>(t, "re");
    std::vector<std::vector<double>> im;
    if (t.contains("im")) im = field<std::vector<std::vector<double>>>(t, "im");
    const auto n = static_cast<Eigen::Index>(re.size());
    DenseMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(re[r].size()) != n) fail(ErrorCode::kParse, "term matrix is not square");
      if (!im.empty() && (im.size() != re.size() || im[r].size() != re[r].size()))
        fail(ErrorCode::kParse, "'im' shape differs from 're'");
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = Complex(re[r][c], im.empty() ? 0.0 : im[r][c]);
    }
    terms.push_back({Region(support), m});
  }
  return Interaction(d, range, std::move(terms));
}

std::string interaction_to_json(const Interaction& phi) {
  json j;
  j["local_dim"] = phi.local_dim();
  j["range"] = phi.range();
  json terms = json::array();
  for (const auto& t : phi.terms()) {
    json jt;
    jt["support"] = t.support.ids();
    std::vector<std::vector<double>> re(t.matrix.rows()), im(t.matrix.rows());
    bool real = true;
    for (Eigen::Index r = 0; r < t.matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < t.matrix.cols(); ++c) {
        re[r].push_back(t.matrix(r, c).real());
        im[r].push_back(t.matrix(r, c).imag());
        real = real && t.matrix(r, c).imag() == 0.0;
      }
    jt["re"] = re;
    if (!real) jt["im"] = im;
    terms.push_back(jt);
  }
  j["terms"] = terms;
  return j.dump(1);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_triplets(const GlobalOperator& h, std::ostream& out) {
  const SparseMatrix m = h.is_dense() ? SparseMatrix(h.dense().sparseView()) : h.sparse();
  out << "# dim " << m.rows() << " nnz " << m.nonZeros() << '\n';
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << format_double(it.value().real()) << ' '
          << format_double(it.value().imag()) << '\n';
}

}  // namespace ffgap
