#include "gaps/io.hpp"

#include <fstream>
#include <vector>

#include <json.hpp>

namespace gaps {

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return doc;
}

void save_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

Vector parse_vector(const json& arr, Index expected, const std::string& what) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != expected) {
    throw IoError(what + ": expected an array of length " + std::to_string(expected));
  }
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json dump_vector(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

SparseMatrix parse_triplets(const json& arr, Index rows, Index cols, const std::string& what) {
  if (!arr.is_array()) throw IoError(what + ": expected a triplet array");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(arr.size());
  for (const auto& t : arr) {
    if (!t.is_array() || t.size() != 3) throw IoError(what + ": each entry must be [row, col, value]");
    const Index r = t[0].get<Index>();
    const Index c = t[1].get<Index>();
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw IoError(what + ": triplet index out of range");
    }
    trips.emplace_back(r, c, t[2].get<double>());
  }
  SparseMatrix a(rows, cols);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

json dump_triplets(const SparseMatrix& a) {
  json arr = json::array();
  for (Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      arr.push_back(json::array({it.row(), it.col(), it.value()}));
    }
  }
  return arr;
}

SetPtr parse_set(const json& node, bool cones_only) {
  const std::string type = node.at("type").get<std::string>();
  const Index dim = node.at("dim").get<Index>();
  if (type == "zero") return std::make_shared<ZeroCone>(dim);
  if (type == "nonneg") return std::make_shared<NonnegativeOrthant>(dim);
  if (type == "soc") return std::make_shared<SecondOrderCone>(dim);
  if (!cones_only) {
    if (type == "free") return std::make_shared<FreeSpace>(dim);
    if (type == "box") {
      return std::make_shared<Box>(parse_vector(node.at("lower"), dim, "box lower"),
                                   parse_vector(node.at("upper"), dim, "box upper"));
    }
  }
  throw IoError("unknown set type '" + type + "'");
}

json dump_set(const ConvexSet& set) {
  json node;
  node["type"] = set.name();
  node["dim"] = set.dim();
  if (const auto* box = dynamic_cast<const Box*>(&set)) {
    node["lower"] = dump_vector(box->lower());
    node["upper"] = dump_vector(box->upper());
  }
  return node;
}

}  // namespace

ConeProgram read_cone_program(const std::filesystem::path& path) {
  const json doc = load_json(path);
  ConeProgram p;
  const Index m = doc.at("m").get<Index>();
  const Index n = doc.at("n").get<Index>();
  p.a = parse_triplets(doc.at("A"), m, n, "A");
  p.b = parse_vector(doc.at("b"), m, "b");
  p.c = parse_vector(doc.at("c"), n, "c");
  std::vector<SetPtr> cones;
  for (const auto& node : doc.at("cones")) cones.push_back(parse_set(node, /*cones_only=*/true));
  if (cones.empty()) throw IoError("cone program: at least one cone required");
  p.cone = std::make_shared<ProductSet>(std::move(cones));
  if (p.cone->dim() != m) throw IoError("cone program: cone dimensions must sum to m");
  return p;
}

void write_cone_program(const std::filesystem::path& path, const ConeProgram& p) {
  json doc;
  doc["m"] = p.rows();
  doc["n"] = p.cols();
  doc["A"] = dump_triplets(p.a);
  doc["b"] = dump_vector(p.b);
  doc["c"] = dump_vector(p.c);
  json cones = json::array();
  if (auto product = std::dynamic_pointer_cast<const ProductSet>(p.cone)) {
    for (const auto& c : product->components()) cones.push_back(dump_set(*c));
  } else {
    cones.push_back(dump_set(*p.cone));
  }
  doc["cones"] = cones;
  save_json(path, doc);
}

FeasibilityProblem read_feasibility_problem(const std::filesystem::path& path) {
  const json doc = load_json(path);
  FeasibilityProblem fp;
  fp.n = doc.at("n").get<Index>();
  const json& aff = doc.at("affine");
  const Index m = aff.at("m").get<Index>();
  SparseMatrix a = parse_triplets(aff.at("A"), m, fp.n, "affine A");
  const Vector rhs = parse_vector(aff.at("rhs"), m, "affine rhs");
  const Vector offset = parse_vector(aff.at("offset"), fp.n, "affine offset");
  fp.affine = std::make_shared<AffineSubspace>(a, Vector(rhs + a * offset));
  std::vector<SetPtr> sets;
  for (const auto& node : doc.at("sets")) sets.push_back(parse_set(node, /*cones_only=*/false));
  if (sets.empty()) throw IoError("feasibility problem: at least one set required");
  fp.second = sets.size() == 1 ? sets[0] : std::make_shared<ProductSet>(std::move(sets));
  if (fp.second->dim() != fp.n) throw IoError("feasibility problem: set dimensions must sum to n");
  return fp;
}

void write_embedded_feasibility(const std::filesystem::path& path, const EmbeddedFeasibility& e) {
  json doc;
  const Index n = e.affine->dim();
  doc["n"] = n;
  json aff;
  aff["m"] = e.affine->rows();
  aff["A"] = dump_triplets(e.affine->sparse_matrix());
  aff["rhs"] = dump_vector(e.affine->rhs());
  aff["offset"] = dump_vector(Vector::Zero(n));
  doc["affine"] = aff;
  json sets = json::array();
  const auto product = std::dynamic_pointer_cast<const ProductSet>(e.coneset);
  for (const auto& c : product->components()) {
    if (auto inner = std::dynamic_pointer_cast<const ProductSet>(c)) {
      for (const auto& cc : inner->components()) sets.push_back(dump_set(*cc));
    } else {
      sets.push_back(dump_set(*c));
    }
  }
  doc["sets"] = sets;
  save_json(path, doc);
}

bool is_cone_program_file(const std::filesystem::path& path) {
  return load_json(path).contains("cones");
}

}  // namespace gaps
