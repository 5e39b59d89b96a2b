#pragma once

#include <iosfwd>
#include <string>

#include "umbilic/mirror.hpp"
#include "umbilic/monodromy.hpp"
#include "umbilic/strata.hpp"

namespace umbilic {

// Canonical JSON forms.  Serialization is deterministic: fixed key order,
// monomials sorted lexicographically, shortest round-trip number formatting.

std::string to_json(const GeneratingFunction& f);
GeneratingFunction generating_function_from_json(const std::string& text);

std::string to_json(const RegionGraph& graph);

std::string to_json(const Loop& loop);
Loop loop_from_json(const std::string& text);

std::string to_json(const CausticData& c);
std::string to_json(const MonodromyResult& r);
std::string to_json(const Report& r);

// CSV emitters.
std::string trajectory_csv(const Trajectory& t);
std::string caustic_csv(const CausticData& c);
std::string mirror_csv(const std::vector<MirrorSample>& samples);

// Wall-matrix text report in display form.
std::string glue_report_text(const RegionGraph& graph);

}  // namespace umbilic
