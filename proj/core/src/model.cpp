#include "cfmgml/model.hpp"

#include <fstream>
#include <stdexcept>

#include "cfmgml/errors.hpp"
#include "cfmgml/version.hpp"
#include "json_util.hpp"

namespace cfmgml {

using detail::json;

double score_graph(const DualModel& m, int cls, std::span<const double> kernel_row) {
  if (cls < 0 || cls >= m.num_classes)
    throw std::invalid_argument("score_graph: class " + std::to_string(cls) +
                                " out of range");
  if (kernel_row.size() != m.scale.size())
    throw std::invalid_argument("score_graph: kernel row length " +
                                std::to_string(kernel_row.size()) + ", expected " +
                                std::to_string(m.scale.size()));
  const auto& row = m.coeff[static_cast<std::size_t>(cls)];
  double s = 0.0;
  for (std::size_t i = 0; i < kernel_row.size(); ++i)
    s += m.scale[i] * row[i] * kernel_row[i];
  return s;
}

std::pair<double, int> score_bag(const DualModel& m, int cls,
                                 const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("score_bag: empty bag");
  double best = 0.0;
  int best_idx = 0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    double s = score_graph(m, cls, rows[j]);
    if (j == 0 || s > best) {
      best = s;
      best_idx = static_cast<int>(j);
    }
  }
  return {best, best_idx};
}

ReprGram repr_gram_from_cache(const GramCache& gram,
                              const std::vector<std::vector<int>>& repr,
                              int num_classes) {
  ReprGram rg;
  int n = static_cast<int>(repr.size());
  rg.num_bags = n;
  rg.per_class.assign(static_cast<std::size_t>(num_classes),
                      std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
  for (int c = 0; c < num_classes; ++c) {
    std::vector<std::size_t> flat(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      flat[static_cast<std::size_t>(i)] =
          gram.flat(static_cast<std::size_t>(i),
                    static_cast<std::size_t>(repr[static_cast<std::size_t>(i)]
                                                 [static_cast<std::size_t>(c)]));
    auto& out = rg.per_class[static_cast<std::size_t>(c)];
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(h) * n + i] =
            gram.at(flat[static_cast<std::size_t>(h)], flat[static_cast<std::size_t>(i)]);
  }
  return rg;
}

ReprGram repr_gram_from_model(const DualModel& m) {
  ReprGram rg;
  int n = m.num_bags();
  rg.num_bags = n;
  rg.per_class.resize(static_cast<std::size_t>(m.num_classes));
  for (int c = 0; c < m.num_classes; ++c) {
    std::vector<Graph> column;
    column.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      column.push_back(m.repr_graphs[static_cast<std::size_t>(i)]
                                    [static_cast<std::size_t>(c)]);
    auto mat = cross_kernel_matrix(column, column, m.kernel);
    auto& out = rg.per_class[static_cast<std::size_t>(c)];
    out.resize(static_cast<std::size_t>(n) * n);
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(h) * n + i] =
            mat[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)];
  }
  return rg;
}

double model_norm_sq(const DualModel& m, const ReprGram& rg) {
  int n = m.num_bags();
  double total = 0.0;
  for (int c = 0; c < m.num_classes; ++c) {
    const auto& row = m.coeff[static_cast<std::size_t>(c)];
    const auto& k = rg.per_class[static_cast<std::size_t>(c)];
    for (int h = 0; h < n; ++h) {
      double ch = m.scale[static_cast<std::size_t>(h)] * row[static_cast<std::size_t>(h)];
      if (ch == 0.0) continue;
      double inner = 0.0;
      for (int i = 0; i < n; ++i)
        inner += m.scale[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(i)] *
                 k[static_cast<std::size_t>(h) * n + i];
      total += ch * inner;
    }
  }
  return total;
}

namespace {

json kernel_to_json(const KernelConfig& cfg) {
  json j;
  j["kind"] = to_string(cfg.kind);
  if (cfg.wl_iterations) j["wl_iterations"] = *cfg.wl_iterations;
  if (cfg.attribute_bandwidth) j["attribute_bandwidth"] = *cfg.attribute_bandwidth;
  j["normalize"] = cfg.normalize;
  return j;
}

KernelConfig kernel_from_json(const json& j, const std::string& where) {
  KernelConfig cfg;
  auto kind = kernel_kind_from_string(
      detail::require_string(detail::require_field(j, "kind", where), "kind", where));
  if (!kind) throw ParseError(where + ": unknown kernel kind");
  cfg.kind = *kind;
  if (auto it = j.find("wl_iterations"); it != j.end())
    cfg.wl_iterations = detail::require_int(*it, "wl_iterations", where);
  if (auto it = j.find("attribute_bandwidth"); it != j.end())
    cfg.attribute_bandwidth = detail::require_double(*it, "attribute_bandwidth", where);
  if (auto it = j.find("normalize"); it != j.end()) {
    if (!it->is_boolean())
      throw ParseError(where + ": field 'normalize' must be a boolean");
    cfg.normalize = it->get<bool>();
  }
  return cfg;
}

// Reader that tracks the byte offset of each line so truncation errors can
// point at the exact position.
struct LineReader {
  std::ifstream in;
  std::string path;
  long long offset = 0;

  explicit LineReader(const std::string& p) : in(p), path(p) {
    if (!in) throw IoError("cannot open model file: " + p);
  }

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in, line))
      throw ParseError(path + ": truncated at byte " + std::to_string(offset) +
                       ", expected " + what);
    offset += static_cast<long long>(line.size()) + 1;
    return line;
  }
};

}  // namespace

void save_model(const DualModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open model file for writing: " + path);

  VertexVariant variant = VertexVariant::label;
  int attr_dim = 0;
  if (!m.repr_graphs.empty() && !m.repr_graphs[0].empty()) {
    const Graph& g0 = m.repr_graphs[0][0];
    variant = g0.variant;
    if (variant == VertexVariant::attribute && !g0.attributes.empty())
      attr_dim = static_cast<int>(g0.attributes[0].size());
  }

  json header;
  header["format"] = "cfmgml-model";
  header["version"] = kModelFormatVersion;
  header["num_classes"] = m.num_classes;
  header["lambda"] = m.lambda;
  header["t_final"] = m.t_final;
  header["num_bags"] = m.num_bags();
  header["kernel"] = kernel_to_json(m.kernel);
  header["vertex_variant"] = to_string(variant);
  if (variant == VertexVariant::attribute) header["attr_dim"] = attr_dim;
  out << header.dump() << '\n';

  out << json{{"coeff", m.coeff}}.dump() << '\n';
  out << json{{"scale", m.scale}}.dump() << '\n';
  out << json{{"repr", m.repr}}.dump() << '\n';
  for (int i = 0; i < m.num_bags(); ++i) {
    json graphs = json::array();
    for (const auto& g : m.repr_graphs[static_cast<std::size_t>(i)])
      graphs.push_back(detail::graph_to_json(g));
    out << json{{"bag", i}, {"graphs", std::move(graphs)}}.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

DualModel load_model(const std::string& path) {
  LineReader reader(path);

  std::string where = "line 1";
  json header = detail::parse_json_line(reader.next("header record"), where);
  if (detail::require_string(detail::require_field(header, "format", where), "format",
                             where) != "cfmgml-model")
    throw ParseError(where + ": not a model file");
  int version = detail::require_int(detail::require_field(header, "version", where),
                                    "version", where);
  if (version != kModelFormatVersion)
    throw ParseError(where + ": unsupported model format version " +
                     std::to_string(version));

  DualModel m;
  m.num_classes = detail::require_int(
      detail::require_field(header, "num_classes", where), "num_classes", where);
  m.lambda = detail::require_double(detail::require_field(header, "lambda", where),
                                    "lambda", where);
  const json& jt = detail::require_field(header, "t_final", where);
  if (!jt.is_number_integer())
    throw ParseError(where + ": field 't_final' must be an integer");
  m.t_final = jt.get<long long>();
  int num_bags = detail::require_int(detail::require_field(header, "num_bags", where),
                                     "num_bags", where);
  m.kernel = kernel_from_json(detail::require_field(header, "kernel", where), where);

  std::string variant_str = detail::require_string(
      detail::require_field(header, "vertex_variant", where), "vertex_variant", where);
  auto variant = vertex_variant_from_string(variant_str);
  if (!variant) throw ParseError(where + ": unknown vertex_variant");
  int attr_dim = 0;
  if (*variant == VertexVariant::attribute)
    attr_dim = detail::require_int(detail::require_field(header, "attr_dim", where),
                                   "attr_dim", where);

  where = "line 2";
  json jc = detail::parse_json_line(reader.next("coefficient record"), where);
  const json& coeff = detail::require_field(jc, "coeff", where);
  if (!coeff.is_array() || static_cast<int>(coeff.size()) != m.num_classes)
    throw ParseError(where + ": coeff must have num_classes rows");
  for (const auto& row : coeff) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(detail::require_double(v, "coeff", where));
    if (static_cast<int>(r.size()) != num_bags)
      throw ParseError(where + ": coeff row must have num_bags entries");
    m.coeff.push_back(std::move(r));
  }

  where = "line 3";
  json js = detail::parse_json_line(reader.next("scale record"), where);
  for (const auto& v : detail::require_field(js, "scale", where))
    m.scale.push_back(detail::require_double(v, "scale", where));
  if (static_cast<int>(m.scale.size()) != num_bags)
    throw ParseError(where + ": scale must have num_bags entries");

  where = "line 4";
  json jr = detail::parse_json_line(reader.next("repr record"), where);
  for (const auto& row : detail::require_field(jr, "repr", where)) {
    std::vector<int> r;
    for (const auto& v : row) r.push_back(detail::require_int(v, "repr", where));
    if (static_cast<int>(r.size()) != m.num_classes)
      throw ParseError(where + ": repr row must have num_classes entries");
    m.repr.push_back(std::move(r));
  }
  if (static_cast<int>(m.repr.size()) != num_bags)
    throw ParseError(where + ": repr must have num_bags rows");

  for (int i = 0; i < num_bags; ++i) {
    where = "line " + std::to_string(5 + i);
    json jb = detail::parse_json_line(
        reader.next(("representative record for bag " + std::to_string(i)).c_str()),
        where);
    const json& graphs = detail::require_field(jb, "graphs", where);
    if (static_cast<int>(graphs.size()) != m.num_classes)
      throw ParseError(where + ": expected one representative graph per class");
    std::vector<Graph> row;
    for (const auto& jg : graphs)
      row.push_back(detail::graph_from_json(jg, *variant, attr_dim, where));
    m.repr_graphs.push_back(std::move(row));
  }
  return m;
}

}  // namespace cfmgml
