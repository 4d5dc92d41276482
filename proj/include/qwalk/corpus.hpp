#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/families.hpp"
#include "qwalk/json_io.hpp"

namespace qwalk {

enum class ClaimStatus { Verified, Failed, Skipped };

std::string to_string(ClaimStatus s);

struct ClaimRecord {
  std::string id;
  double q = 1.0;
  double time = 0.0;
  double fidelity = 0.0;
  double residual = 0.0;
  ClaimStatus status = ClaimStatus::Skipped;
  std::string detail;
};

enum class Expectation { Pst, NoPst };

/// A state-transfer claim on a family built from parameters (which may
/// depend on q), optionally with a second graph glued on.
struct ClaimSpec {
  std::string id;
  std::string family;
  ParamMap params;
  std::optional<std::string> attach_family;
  ParamMap attach_params;
  std::string attach_at;
  Claim claim;
  Expectation expect = Expectation::Pst;
  double horizon = 10.0;  // search horizon for NoPst

  FamilyInstance build(double q) const;
};

struct CorpusEntry {
  std::string id;
  bool sample_q = true;  // false: run once, at q = 1 unless the check pins q itself
  std::function<ClaimRecord(double q, double tol)> run;
  std::optional<ClaimSpec> spec;  // set for state-transfer claims
};

CorpusEntry claim_entry(ClaimSpec spec);

/// The built-in claim corpus, in its fixed order.
std::vector<CorpusEntry> default_corpus();

/// {"claims": [{"id", "family", "params", "attach"?, "x", "y", "time",
///              "matrix"?, "q"?, "expect"?, "horizon"?}]}
std::vector<CorpusEntry> load_claims(const json& j);

struct CorpusOptions {
  std::vector<double> q_samples{1.0, -1.0, 0.5};
  double tol = kDefaultPstTol;
  std::vector<std::string> only;  // id prefixes; empty: everything
};

std::vector<ClaimRecord> run_corpus(const std::vector<CorpusEntry>& entries,
                                    const CorpusOptions& opts);

/// id,q,time,fidelity,residual,status with %.12e numbers.
std::string corpus_csv(const std::vector<ClaimRecord>& records);

/// Families of all state-transfer claims in the corpus, built at q.
std::vector<std::pair<std::string, FamilyInstance>> corpus_instances(
    const std::vector<CorpusEntry>& entries, double q);

}  // namespace qwalk
