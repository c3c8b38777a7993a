#pragma once

// Residue subset coding and the combinatorial constructions built on it:
// Paley-graph coding and counting, pair/triple injection, the measure
// experiment, TP2 grids, strictly increasing coded chains, the truncated
// arithmetic interpretation, and the acl experiment.
//
// A code y represents E inside A by the residue pattern of a + y: members of
// E decode as squares (0 counts as a square), members of A \ E decode as
// nonzero non-squares. Certificates are re-verified element by element,
// independently of the search loop.

#include <optional>
#include <string>
#include <vector>

#include "froblab/engine.hpp"
#include "froblab/field.hpp"

namespace froblab {

struct CodingCertificate {
    u64 code = 0;                // y
    std::vector<u64> set_a;      // ambient A, canonical index order of input
    std::vector<u64> target_e;   // E subset of A
    std::string kind;            // "square" | "cube" | "paley"
    bool verified = false;
    u64 search_range = 0;        // candidates probed before the hit
    bool theorem_scale = false;  // q > 2^(14 |A|)
};

struct CodingResult {
    std::optional<CodingCertificate> cert;  // nullopt = NotFound
    u64 search_range = 0;                   // candidates probed in total
};

struct CodingSearchOptions {
    int workers = 0;
    bool random_order = false;  // seeded random probing instead of canonical scan
    u64 seed = 0;
    u64 max_probes = 0;  // random mode probe cap; 0 = q
};

CodingResult code_subset_square(const Field& field, const std::vector<u64>& set_a, const std::vector<u64>& target_e,
                                const CodingSearchOptions& opts = {});
CodingResult code_subset_cube(const Field& field, const std::vector<u64>& set_a, const std::vector<u64>& target_e,
                              const CodingSearchOptions& opts = {});

// Re-derives the decoded membership pattern of cert.code over cert.set_a and
// compares it with cert.target_e.
bool verify_certificate(const Field& field, const CodingCertificate& cert);

// Paley adjacency: x R y iff x - y is a nonzero square (q = 1 mod 4).
CodingResult paley_code(const Field& field, const std::vector<u64>& set_a, const std::vector<u64>& target_e,
                        const CodingSearchOptions& opts = {});

struct PaleyCount {
    u64 v_count = 0;       // |V(E, A \ E)|
    double expected = 0;   // q / 2^m
    double bound = 0;      // (m-2+2^{1-m}) sqrt(q) / 2 + m/2
    bool bound_checked = false;  // false for the m = 0 edge case
    bool bound_ok = true;
};

PaleyCount paley_count(const Field& field, const std::vector<u64>& set_a, const std::vector<u64>& target_e,
                       const EngineOptions& opts = {});

struct PairInjection {
    u64 a = 0;                // least index outside the difference-quotient set W and 0
    std::vector<u64> t_set;   // {y1 + a y2}, sorted; exactly |Y|^2 distinct elements
};

PairInjection pair_inject(const Field& field, const std::vector<u64>& y_set);

struct MeasureStats {
    int n = 0;
    u64 q = 0;
    int trials = 0;
    u64 seed = 0;
    std::vector<u64> counts;
    std::vector<double> deviations;  // |count - q/2^n| / sqrt(q)
    double max_dev = 0;
    double theoretical_bound = 0;  // ((l-1)(l-2) + 5 l^{13/3}/sqrt q)/2^n, l = 2^n
    bool precondition_ok = false;  // q > 2(r+1) l^2 with r = 1
    bool all_within_bound = true;
};

MeasureStats measure_experiment(const Field& field, int n, int trials, u64 seed, const EngineOptions& opts = {});

struct Tp2Report {
    int n = 0;
    u64 q = 0;
    std::vector<std::vector<CodingCertificate>> grid;  // n x n
    bool rows_partition_ok = false;  // each row's decoded cells partition A_n
    bool paths_consistent_ok = false;  // every path has a common decoded element
};

Tp2Report tp2_witness(const Field& field, int n, const CodingSearchOptions& opts = {});

struct ChainReport {
    std::vector<CodingCertificate> codes;  // codes of A_1 < A_2 < ... inside Fix(sigma)
    bool strict_inclusions_ok = false;
};

ChainReport code_chain(const Field& field, int length, const CodingSearchOptions& opts = {});

struct RelationInstance {
    std::string relation;  // "R+", "Rx", "E"
    int i = 0, j = 0, r = 0;  // r unused for E
    bool expected = false;
    bool found = false;
    std::optional<u64> witness;
};

struct TruncArithReport {
    int n = 0;  // |Y|; interpreted structure is {0..n} with truncated ops
    u64 q = 0;
    u64 inj1 = 0, inj2 = 0;              // injector elements
    std::vector<u64> rep_codes;          // codes of the canonical subsets of Y, sizes 0..n
    std::vector<RelationInstance> instances;
    bool isomorphic = false;
    u64 probes_used = 0;
};

// Best-effort verification that the coded quotient structure realizes
// ({0..|Y|}, truncated +, x). probe_budget caps decode probes across all
// witness scans.
TruncArithReport interpret_truncated_arithmetic(const Field& field, const std::vector<u64>& y_set,
                                                u64 probe_budget = 1'000'000'000ull,
                                                const CodingSearchOptions& opts = {});

struct AclReport {
    u64 n = 0;
    u64 q = 0;
    u64 a_index = 0;
    u64 fixed_size = 0;  // p^n
    u64 count = 0;       // |xi(F, a)|
    double expected = 0;  // q / 2^(p^n)
    double bound = 0;     // ((l-1)(l-2) sqrt q + 5 l^{13/3}) / 2^(p^n), l = 2^(p^n)
    bool precondition_ok = false;
    bool bound_ok = false;
};

AclReport acl_experiment(const Field& field, u64 n, std::optional<u64> a_index = std::nullopt,
                         const EngineOptions& opts = {});

}  // namespace froblab
