#pragma once

// JSON interchange.
//
//   state:        {"n": int, "m": int, "gamma": [[...], ...]}   interleaved (x1,p1,...)
//   certificate:  {"gamma_A": [[..]], "gamma_B": [[..]], "P": [[..]], "margins": [a, b, p]}

#include <json.hpp>

#include <sstream>
#include <string>

#include "gaussep/certify.hpp"
#include "gaussep/engine.hpp"
#include "gaussep/gaussian.hpp"

namespace gaussep::io {

using json = nlohmann::json;

inline json matrix_to_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RMat matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw InputError("'" + field + "' must be a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw InputError("'" + field + "' row 0 is not an array");
  const std::size_t cols = j[0].size();
  RMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      std::ostringstream os;
      os << "'" << field << "' is not rectangular: row " << r << " has "
         << (row.is_array() ? row.size() : 0) << " entries, expected " << cols;
      throw InputError(os.str());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        std::ostringstream os;
        os << "'" << field << "'[" << r << "][" << c << "] is not a number";
        throw InputError(os.str());
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

inline int positive_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw InputError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<int>();
}

/// Parses and checks a state document. Error messages name the violated
/// invariant: parse failure, shape, odd dimension, mode count, symmetry.
inline BipartiteCM state_from_json(const json& doc, const ToleranceConfig& tol = {}) {
  if (!doc.is_object()) throw InputError("state document must be a JSON object");
  const int n = positive_int(doc, "n");
  const int m = positive_int(doc, "m");
  if (!doc.contains("gamma")) throw InputError("missing field 'gamma'");
  const RMat g = matrix_from_json(doc.at("gamma"), "gamma");
  if (g.rows() != g.cols()) {
    std::ostringstream os;
    os << "'gamma' must be square, got " << g.rows() << "x" << g.cols();
    throw InputError(os.str());
  }
  if (g.rows() % 2 != 0) {
    std::ostringstream os;
    os << "'gamma' has odd dimension " << g.rows();
    throw InputError(os.str());
  }
  if (g.rows() != 2 * (n + m)) {
    std::ostringstream os;
    os << "'gamma' is " << g.rows() << "x" << g.cols() << " but n + m = " << n + m
       << " requires " << 2 * (n + m);
    throw InputError(os.str());
  }
  return split(g, n, m, tol).blocks;
}

inline BipartiteCM state_from_string(const std::string& text, const ToleranceConfig& tol = {}) {
  return state_from_json(parse_json(text), tol);
}

inline json state_to_json(const BipartiteCM& bip) {
  return json{{"n", bip.n}, {"m", bip.m}, {"gamma", matrix_to_json(assemble(bip))}};
}

inline json certificate_to_json(const SeparabilityCertificate& cert, const CertificateCheck& check) {
  return json{{"gamma_A", matrix_to_json(cert.gamma_A)},
              {"gamma_B", matrix_to_json(cert.gamma_B)},
              {"P", matrix_to_json(cert.P)},
              {"margins", json::array({check.margins[0], check.margins[1], check.margins[2]})}};
}

inline SeparabilityCertificate certificate_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("certificate document must be a JSON object");
  for (const char* key : {"gamma_A", "gamma_B", "P"}) {
    if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  }
  SeparabilityCertificate cert;
  cert.gamma_A = matrix_from_json(doc.at("gamma_A"), "gamma_A");
  cert.gamma_B = matrix_from_json(doc.at("gamma_B"), "gamma_B");
  cert.P = matrix_from_json(doc.at("P"), "P");
  return cert;
}

inline json verdict_to_json(const Verdict& v) {
  json hist = json::array();
  for (Real c : v.c_opnorm_history()) hist.push_back(c);
  return json{{"verdict", to_string(v.kind)},
              {"step", v.step},
              {"margin", v.margin},
              {"marginal", v.marginal},
              {"reason", to_string(v.reason())},
              {"c_opnorm_history", std::move(hist)}};
}

inline json complex_vector_to_json(const CVec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    out.push_back(json::array({v(k).real(), v(k).imag()}));
  }
  return out;
}

inline json witness_to_json(const EntanglementWitness& w) {
  return json{{"step", w.step},
              {"lambda_min", w.lambda_min},
              {"eigenvector", complex_vector_to_json(w.eigenvector)}};
}

}  // namespace gaussep::io
