#include "zofd/report_json.hpp"

namespace zofd {

void to_json(nlohmann::json& j, const SmoothingReport& r) {
  j = nlohmann::json{{"d", r.d},
                     {"ell", r.ell},
                     {"h", r.h},
                     {"n_samples", r.n_samples},
                     {"mse_structured", r.mse_structured},
                     {"se_structured", r.se_structured},
                     {"mse_unstructured", r.mse_unstructured},
                     {"se_unstructured", r.se_unstructured},
                     {"grad_smooth_norm_sq", r.grad_smooth_norm_sq},
                     {"grad_smooth_norm_sq_se", r.grad_smooth_norm_sq_se},
                     {"predicted_gap", r.predicted_gap},
                     {"observed_gap", r.observed_gap},
                     {"mse_se", r.mse_se},
                     {"combined_se", r.combined_se},
                     {"gap_without_probe_scale", r.gap_without_probe_scale},
                     {"inequality_holds", r.inequality_holds},
                     {"gap_identity_holds", r.gap_identity_holds},
                     {"unscaled_gap_consistent", r.unscaled_gap_consistent}};
}

void from_json(const nlohmann::json& j, SmoothingReport& r) {
  j.at("d").get_to(r.d);
  j.at("ell").get_to(r.ell);
  j.at("h").get_to(r.h);
  j.at("n_samples").get_to(r.n_samples);
  j.at("mse_structured").get_to(r.mse_structured);
  j.at("se_structured").get_to(r.se_structured);
  j.at("mse_unstructured").get_to(r.mse_unstructured);
  j.at("se_unstructured").get_to(r.se_unstructured);
  j.at("grad_smooth_norm_sq").get_to(r.grad_smooth_norm_sq);
  j.at("grad_smooth_norm_sq_se").get_to(r.grad_smooth_norm_sq_se);
  j.at("predicted_gap").get_to(r.predicted_gap);
  j.at("observed_gap").get_to(r.observed_gap);
  j.at("mse_se").get_to(r.mse_se);
  j.at("combined_se").get_to(r.combined_se);
  j.at("gap_without_probe_scale").get_to(r.gap_without_probe_scale);
  j.at("inequality_holds").get_to(r.inequality_holds);
  j.at("gap_identity_holds").get_to(r.gap_identity_holds);
  j.at("unscaled_gap_consistent").get_to(r.unscaled_gap_consistent);
}

void to_json(nlohmann::json& j, const UnbiasednessResult& r) {
  j = nlohmann::json{{"kind", std::string(to_string(r.kind))},
                     {"ell", r.ell},
                     {"n_samples", r.n_samples},
                     {"max_deviation", r.max_deviation},
                     {"std_error", r.std_error},
                     {"max_z", r.max_z},
                     {"z_threshold", r.z_threshold},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const ProblemSpec& spec) {
  j = nlohmann::json{{"name", spec.name}, {"d", spec.dim}, {"seed", spec.seed}, {"params", spec.params}};
}

void from_json(const nlohmann::json& j, ProblemSpec& spec) {
  j.at("name").get_to(spec.name);
  j.at("d").get_to(spec.dim);
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.params = j.value("params", std::map<std::string, double>{});
}

}  // namespace zofd
