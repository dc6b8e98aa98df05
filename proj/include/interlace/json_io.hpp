#pragma once

#include <json.hpp>

#include <complex>
#include <string>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/linalg.hpp"
#include "interlace/realstable.hpp"
#include "interlace/unipoly.hpp"

namespace interlace {

using Json = nlohmann::ordered_json;

// Matrix schema: {"dim": d, "entries": [[[re, im], ...], ...]}, row-major.
inline Json matrix_to_json(const ComplexMatrix& M) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      row.push_back(Json::array({M(i, j).real(), M(i, j).imag()}));
    entries.push_back(std::move(row));
  }
  return Json{{"dim", M.rows()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw Error(ErrorCode::BadInput, "matrix JSON needs \"dim\" and \"entries\"");
  const int d = j.at("dim").get<int>();
  if (d < 0) throw Error(ErrorCode::BadInput, "matrix dimension must be nonnegative");
  const Json& entries = j.at("entries");
  if (!entries.is_array() || static_cast<int>(entries.size()) != d)
    throw Error(ErrorCode::BadInput, "entries must be a dim x dim array");
  ComplexMatrix M(d, d);
  for (int a = 0; a < d; ++a) {
    const Json& row = entries.at(static_cast<std::size_t>(a));
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw Error(ErrorCode::BadInput, "entries must be a dim x dim array");
    for (int b = 0; b < d; ++b) {
      const Json& cell = row.at(static_cast<std::size_t>(b));
      if (!cell.is_array() || cell.size() != 2)
        throw Error(ErrorCode::BadInput, "each entry must be a [re, im] pair");
      M(a, b) = std::complex<double>(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return M;
}

// System schema: {"matrices": [Matrix, ...]}.
inline Json system_to_json(const PSDSystem& S) {
  Json ms = Json::array();
  for (const auto& A : S.matrices) ms.push_back(matrix_to_json(A));
  return Json{{"matrices", std::move(ms)}};
}

inline std::vector<ComplexMatrix> matrices_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("matrices") || !j.at("matrices").is_array())
    throw Error(ErrorCode::BadInput, "system JSON needs a \"matrices\" array");
  std::vector<ComplexMatrix> ms;
  for (const auto& mj : j.at("matrices")) ms.push_back(matrix_from_json(mj));
  if (ms.empty()) throw Error(ErrorCode::BadInput, "system must contain a matrix");
  for (const auto& M : ms)
    if (M.rows() != ms.front().rows())
      throw Error(ErrorCode::BadInput, "system matrices must share one dimension");
  return ms;
}

inline PSDSystem system_from_json(const Json& j,
                                  const Tolerances& tol = default_tolerances()) {
  auto ms = matrices_from_json(j);
  const int dim = static_cast<int>(ms.front().rows());
  return PSDSystem::validate(dim, std::move(ms), tol);
}

// Partition schema: {"blocks": [[indices], ...]} with 1-based indices.
inline Json blocks_to_json(const std::vector<std::vector<int>>& blocks) {
  Json out = Json::array();
  for (const auto& blk : blocks) {
    Json b = Json::array();
    for (int u : blk) b.push_back(u + 1);
    out.push_back(std::move(b));
  }
  return Json{{"blocks", std::move(out)}};
}

inline std::vector<std::vector<int>> blocks_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j.at("blocks").is_array())
    throw Error(ErrorCode::BadInput, "partition JSON needs a \"blocks\" array");
  std::vector<std::vector<int>> blocks;
  for (const auto& bj : j.at("blocks")) {
    if (!bj.is_array()) throw Error(ErrorCode::BadInput, "each block must be an array");
    std::vector<int> blk;
    for (const auto& u : bj) blk.push_back(u.get<int>() - 1);
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

inline Json poly_to_json(const RealPoly& p) { return Json(p.coeffs); }

inline RealPoly poly_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::BadInput, "polynomial must be a coefficient array");
  std::vector<double> c;
  for (const auto& v : j) c.push_back(v.get<double>());
  return RealPoly(std::move(c));
}

inline Json tolerances_to_json(const Tolerances& t) {
  return Json{{"hermitian", t.hermitian}, {"psd_clamp", t.psd_clamp},
              {"root", t.root},           {"projection", t.projection},
              {"interlace", t.interlace}, {"sign_scale", t.sign_scale},
              {"fd", t.fd},               {"stability", t.stability},
              {"sum_identity", t.sum_identity}, {"rank", t.rank}};
}

inline void tolerances_from_json(const Json& j, Tolerances& t) {
  auto get = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  get("hermitian", t.hermitian);
  get("psd_clamp", t.psd_clamp);
  get("root", t.root);
  get("projection", t.projection);
  get("interlace", t.interlace);
  get("sign_scale", t.sign_scale);
  get("fd", t.fd);
  get("stability", t.stability);
  get("sum_identity", t.sum_identity);
  get("rank", t.rank);
}

inline Json budgets_to_json(const Budgets& b) {
  return Json{{"interpolation_evals", b.interpolation_evals},
              {"enumeration", b.enumeration},
              {"subsets", b.subsets},
              {"local_restarts", b.local_restarts},
              {"local_moves", b.local_moves}};
}

inline void budgets_from_json(const Json& j, Budgets& b) {
  if (j.contains("interpolation_evals"))
    b.interpolation_evals = j.at("interpolation_evals").get<std::int64_t>();
  if (j.contains("enumeration")) b.enumeration = j.at("enumeration").get<std::int64_t>();
  if (j.contains("subsets")) b.subsets = j.at("subsets").get<std::int64_t>();
  if (j.contains("local_restarts")) b.local_restarts = j.at("local_restarts").get<int>();
  if (j.contains("local_moves")) b.local_moves = j.at("local_moves").get<std::int64_t>();
}

}  // namespace interlace
