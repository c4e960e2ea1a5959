#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "nonterm/certificate.hpp"
#include "nonterm/encoder.hpp"
#include "nonterm/solver.hpp"
#include "nonterm/transform.hpp"

namespace nonterm {

enum class Mode { Wn, SnBasic, SnImproved, Auto };

std::string to_string(Mode m);
Mode parse_mode(std::string_view s);

struct ProverConfig {
    Mode mode = Mode::Auto;
    int min_states = 1;
    int max_states = 5;
    ReductBounds reducts;
    /// Per SAT call, in seconds.
    std::optional<double> timeout;
    /// Uncurry when some arity exceeds two.
    bool uncurry = true;
    Backend backend;
    /// Explore (mode, size) pairs concurrently.
    bool parallel = false;

    /// Throws Error on an invalid state range or reduct bounds.
    void validate() const;
};

struct Attempt {
    Method method = Method::Wn;
    int states = 0;
    int vars = 0;
    std::size_t clauses = 0;
    std::string result;
    double seconds = 0.0;
};

enum class Outcome { NotWN, NotSN, Unknown };
std::string to_string(Outcome o);

struct Report {
    Outcome verdict = Outcome::Unknown;
    std::optional<Certificate> certificate;
    std::vector<Attempt> attempts;
    /// The preprocessed system the certificate refers to.
    Trs system;
    Preprocessing trace;
    /// Why no method was applicable, if so.
    std::string note;
};

/// The CNF for one method and size. `trs` must be preprocessed and left-linear.
CnfProblem encode(const Trs& trs, Method method, int num_states, const ReductBounds& bounds = {});

/// Encodes, solves, decodes and verifies. Returns the certificate on Sat, none otherwise.
/// A model the checker rejects raises SoundnessError. `attempt` receives the log entry.
std::optional<Certificate> disprove(const Trs& trs, Method method, int num_states, const ProverConfig& cfg,
                                    Attempt* attempt = nullptr, const std::atomic<bool>* stop = nullptr);

inline std::optional<Certificate> disprove_wn(const Trs& trs, int n, const ProverConfig& cfg) {
    return disprove(trs, Method::Wn, n, cfg);
}
inline std::optional<Certificate> disprove_sn_basic(const Trs& trs, int n, const ProverConfig& cfg) {
    return disprove(trs, Method::SnBasic, n, cfg);
}
inline std::optional<Certificate> disprove_sn_improved(const Trs& trs, int n, const ProverConfig& cfg) {
    return disprove(trs, Method::SnImproved, n, cfg);
}

/// Preprocesses `trs`, then tries methods in order (wn, sn-basic, sn-improved for auto)
/// with sizes min..max; the first verified certificate wins.
Report search(const Trs& trs, const ProverConfig& cfg);

} // namespace nonterm
