#pragma once

#include <json.hpp>
#include <string>

#include "fraclap/barriers.hpp"
#include "fraclap/boundary_analysis.hpp"
#include "fraclap/critical_exponents.hpp"
#include "fraclap/solvers.hpp"
#include "fraclap/sweep.hpp"

namespace fraclap {

using Json = nlohmann::ordered_json;

const char* version();

Json to_json(const ProblemParams& p);
Json to_json(const KernelConstants& kc);
Json to_json(const RegimeReport& r);
Json to_json(const BarrierSpec& b);
// points are included when with_points is set
Json to_json(const VerifyReport& r, bool with_points = false);
Json to_json(const BarrierPair& p);
Json to_json(const FamilyMember& m);
Json to_json(const RateFit& f);
Json to_json(const BandCheck& b);
Json to_json(const Prop32Report& r);
Json to_json(const IterationTrace& t);
Json to_json(const BlowupResult& r);
Json to_json(const SweepRow& r);
Json to_json(const IterationConfig& c);

// Non-finite numbers become null.
Json number(double x);

void write_json(const std::string& path, const Json& j);

}  // namespace fraclap
