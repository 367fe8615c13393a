#include "tdrc/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tdrc/errors.hpp"

namespace tdrc::io {

namespace {

static_assert(std::endian::native == std::endian::little, "model files are written little-endian");

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

/// Reads one line, stripping a trailing '\r'.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool blank(const std::string& line) { return normalize_id(line).empty(); }

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  return out;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_header_name(const std::string& field, const char* name) {
  const auto f = normalize_id(field);
  return f == name || f == std::string(name) + "_id";
}

}  // namespace

Dataset parse_triplets(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3)
      throw ParseError("expected 3 tab-separated columns, found " + std::to_string(fields.size()), lineno);
    if (first && is_header_name(fields[0], "mirna") && is_header_name(fields[1], "disease") &&
        is_header_name(fields[2], "type")) {
      first = false;
      continue;
    }
    first = false;
    for (const auto& f : fields)
      if (normalize_id(f).empty()) throw ParseError("empty identifier", lineno);
    ds.triplets.push_back({ds.mirnas.add(fields[0]), ds.diseases.add(fields[1]), ds.types.add(fields[2])});
  }
  if (ds.triplets.empty()) throw ParseError("no associations found");
  ds.duplicates_dropped = ds.normalize();
  return ds;
}

Dataset load_triplets(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_triplets(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Dataset filter_min_associations(const Dataset& ds, std::size_t min_associations) {
  std::vector<std::size_t> per_mirna(static_cast<std::size_t>(ds.m()), 0), per_disease(static_cast<std::size_t>(ds.n()), 0);
  for (const auto& tr : ds.triplets) {
    ++per_mirna[static_cast<std::size_t>(tr.mirna)];
    ++per_disease[static_cast<std::size_t>(tr.disease)];
  }
  auto keep = [&](const Triplet& tr) {
    return per_mirna[static_cast<std::size_t>(tr.mirna)] >= min_associations &&
           per_disease[static_cast<std::size_t>(tr.disease)] >= min_associations;
  };
  std::vector<bool> mirna_used(static_cast<std::size_t>(ds.m()), false), disease_used(static_cast<std::size_t>(ds.n()), false);
  for (const auto& tr : ds.triplets)
    if (keep(tr)) {
      mirna_used[static_cast<std::size_t>(tr.mirna)] = true;
      disease_used[static_cast<std::size_t>(tr.disease)] = true;
    }

  Dataset out;
  std::vector<Index> mirna_map(static_cast<std::size_t>(ds.m()), -1), disease_map(static_cast<std::size_t>(ds.n()), -1);
  for (Index i = 0; i < ds.m(); ++i)
    if (mirna_used[static_cast<std::size_t>(i)]) mirna_map[static_cast<std::size_t>(i)] = out.mirnas.add(ds.mirnas.label(i));
  for (Index j = 0; j < ds.n(); ++j)
    if (disease_used[static_cast<std::size_t>(j)]) disease_map[static_cast<std::size_t>(j)] = out.diseases.add(ds.diseases.label(j));
  for (Index k = 0; k < ds.t(); ++k) out.types.add(ds.types.label(k));
  for (const auto& tr : ds.triplets)
    if (keep(tr))
      out.triplets.push_back({mirna_map[static_cast<std::size_t>(tr.mirna)], disease_map[static_cast<std::size_t>(tr.disease)], tr.type});
  out.normalize();
  out.duplicates_dropped = ds.duplicates_dropped;
  return out;
}

DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats s{ds.m(), ds.n(), ds.t(), ds.triplets.size(), 0.0};
  const double cells = static_cast<double>(s.mirnas) * static_cast<double>(s.diseases) * static_cast<double>(s.types);
  if (cells > 0.0) s.density = static_cast<double>(s.triplets) / cells;
  return s;
}

DiseaseDag parse_dag(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2)
      throw ParseError("expected 2 tab-separated columns (disease, tree number), found " +
                           std::to_string(fields.size()),
                       lineno);
    std::string tree = fields[1];
    while (!tree.empty() && std::isspace(static_cast<unsigned char>(tree.back()))) tree.pop_back();
    while (!tree.empty() && std::isspace(static_cast<unsigned char>(tree.front()))) tree.erase(tree.begin());
    if (tree.empty() || tree.front() == '.' || tree.back() == '.' || tree.find("..") != std::string::npos)
      throw ParseError("malformed tree number '" + fields[1] + "'", lineno);
    if (normalize_id(fields[0]).empty()) throw ParseError("empty disease identifier", lineno);
    rows.emplace_back(fields[0], tree);
  }
  if (rows.empty()) throw ParseError("disease hierarchy file is empty");
  try {
    return DiseaseDag::from_tree_numbers(rows);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

DiseaseDag load_dag(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_dag(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_similarity(const SimilarityMatrix& s, std::ostream& out) {
  for (const auto& label : s.labels) out << '\t' << label;
  out << '\n';
  for (Index i = 0; i < s.size(); ++i) {
    out << s.labels[static_cast<std::size_t>(i)];
    for (Index j = 0; j < s.size(); ++j) out << '\t' << format_g17(s.values(i, j));
    out << '\n';
  }
}

void save_similarity(const SimilarityMatrix& s, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_similarity(s, out);
  if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

SimilarityMatrix parse_similarity(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  SimilarityMatrix s;
  while (next_line(in, line)) {
    ++lineno;
    if (!blank(line)) break;
  }
  if (lineno == 0 || blank(line)) throw ParseError("similarity file is empty");
  auto header = split_tabs(line);
  header.erase(header.begin());
  s.labels = header;
  const auto n = static_cast<Index>(header.size());
  s.values.resize(n, n);
  Index row = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto fields = split_tabs(line);
    if (row >= n) throw ParseError("similarity matrix has more rows than columns", lineno);
    if (static_cast<Index>(fields.size()) != n + 1)
      throw ParseError("similarity row has " + std::to_string(fields.size() - 1) + " values, expected " +
                           std::to_string(n),
                       lineno);
    if (normalize_id(fields[0]) != normalize_id(header[static_cast<std::size_t>(row)]))
      throw ParseError("row label '" + fields[0] + "' does not match column label '" +
                           header[static_cast<std::size_t>(row)] + "'",
                       lineno);
    for (Index j = 0; j < n; ++j) {
      const std::string& f = fields[static_cast<std::size_t>(j + 1)];
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) throw ParseError("bad number '" + f + "'", lineno);
      s.values(row, j) = v;
    }
    ++row;
  }
  if (row != n) throw ParseError("similarity matrix is not square: " + std::to_string(row) + " rows, " +
                                 std::to_string(n) + " columns");
  try {
    s.validate(1e-9);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return s;
}

SimilarityMatrix load_similarity(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_similarity(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Matrix align_similarity(const SimilarityMatrix& s, const Vocabulary& vocab) {
  Vocabulary own;
  for (const auto& l : s.labels) own.add(l);
  std::vector<Index> idx;
  for (const auto& label : vocab.labels()) {
    auto pos = own.find(label);
    if (!pos) throw DomainError("similarity matrix has no entry for '" + label + "'");
    idx.push_back(*pos);
  }
  const auto n = static_cast<Index>(idx.size());
  Matrix out(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) out(a, b) = s.values(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return out;
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_matrix(std::ostream& out, const Matrix& a) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) put(out, a(i, j));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (in.gcount() != static_cast<std::streamsize>(sizeof v)) throw ParseError("model file is truncated");
  return v;
}

Matrix get_matrix(std::istream& in, Index rows, Index cols) {
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = get<double>(in);
  return a;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto& fs = model.factors;
  fs.validate(true);
  const Index r = fs.rank();
  if (model.M1.rows() != r || model.M1.cols() != r || model.M2.rows() != r || model.M2.cols() != r)
    throw DimensionError("projection matrices must be rank x rank");
  auto out = open_out(path, true);
  out.write(kModelMagic, sizeof kModelMagic);
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint32_t>(out, model.method == Method::kCp ? 1u : 0u);
  for (Index d : {fs.C.rows(), fs.P.rows(), fs.F.rows(), r}) put<std::uint64_t>(out, static_cast<std::uint64_t>(d));
  const auto& hp = model.hp;
  for (double v : {hp.alpha, hp.beta, hp.lambda, hp.mu, hp.rho_init, hp.rho_cap, hp.tol, hp.cg_tol}) put(out, v);
  put<std::int64_t>(out, hp.max_iter);
  put<std::int64_t>(out, hp.cg_max_iter);
  put<std::uint64_t>(out, hp.seed);
  for (const Matrix* a : {&fs.C, &fs.P, &fs.F, &model.M1, &model.M2}) put_matrix(out, *a);
  if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  const auto file_size = std::filesystem::file_size(path);
  char magic[sizeof kModelMagic];
  in.read(magic, sizeof magic);
  if (in.gcount() != static_cast<std::streamsize>(sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    throw ParseError(path.string() + ": not a model file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kModelVersion)
    throw ParseError(path.string() + ": model format version " + std::to_string(version) +
                     " is not supported (expected " + std::to_string(kModelVersion) + ")");
  Model model;
  const auto method = get<std::uint32_t>(in);
  if (method > 1) throw ParseError(path.string() + ": unknown method tag " + std::to_string(method));
  model.method = method == 1 ? Method::kCp : Method::kTdrc;
  std::uint64_t dims[4];
  for (auto& d : dims) d = get<std::uint64_t>(in);
  const std::uint64_t m = dims[0], n = dims[1], t = dims[2], r = dims[3];
  constexpr std::uint64_t kHeader = 8 + 4 + 4 + 4 * 8 + 8 * 8 + 3 * 8;
  const std::uint64_t limit = file_size / sizeof(double);
  if (r == 0 || m > limit || n > limit || t > limit || r > limit ||
      kHeader + 8 * (r * (m + n + t) + 2 * r * r) != file_size)
    throw ParseError(path.string() + ": dimensions " + std::to_string(m) + "x" + std::to_string(n) + "x" +
                     std::to_string(t) + " rank " + std::to_string(r) + " are inconsistent with the file size");
  auto& hp = model.hp;
  for (double* v : {&hp.alpha, &hp.beta, &hp.lambda, &hp.mu, &hp.rho_init, &hp.rho_cap, &hp.tol, &hp.cg_tol})
    *v = get<double>(in);
  hp.max_iter = static_cast<int>(get<std::int64_t>(in));
  hp.cg_max_iter = static_cast<int>(get<std::int64_t>(in));
  hp.seed = get<std::uint64_t>(in);
  hp.rank = static_cast<Index>(r);
  hp.allow_high_rank = true;
  const auto R = static_cast<Index>(r);
  model.factors.C = get_matrix(in, static_cast<Index>(m), R);
  model.factors.P = get_matrix(in, static_cast<Index>(n), R);
  model.factors.F = get_matrix(in, static_cast<Index>(t), R);
  model.M1 = get_matrix(in, R, R);
  model.M2 = get_matrix(in, R, R);
  model.factors.validate(true);
  return model;
}

void write_predictions(const std::vector<DiseaseRanking>& rankings, const Dataset& ds, std::ostream& out) {
  out << "disease_id\trank\tmirna_id\ttype_id\tscore\n";
  char buf[64];
  for (const auto& r : rankings) {
    std::size_t rank = 0;
    for (const auto& p : r.predictions) {
      std::snprintf(buf, sizeof buf, "%.6f", p.score);
      out << ds.diseases.label(r.disease) << '\t' << ++rank << '\t' << ds.mirnas.label(p.mirna) << '\t'
          << ds.types.label(p.type) << '\t' << buf << '\n';
    }
  }
}

void export_predictions(const std::vector<DiseaseRanking>& rankings, const Dataset& ds,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  write_predictions(rankings, ds, out);
  if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

void write_history(const std::vector<IterationRecord>& history, std::ostream& out) {
  out << "iteration\tobjective\trelative_change\tprimal_c\tprimal_p\trho1\trho2\n";
  for (const auto& h : history)
    out << h.iteration << '\t' << format_g17(h.objective) << '\t' << format_g17(h.relative_change) << '\t'
        << format_g17(h.primal_c) << '\t' << format_g17(h.primal_p) << '\t' << format_g17(h.rho1) << '\t'
        << format_g17(h.rho2) << '\n';
}

}  // namespace tdrc::io
