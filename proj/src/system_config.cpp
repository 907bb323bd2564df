#include "holobf/system_config.hpp"

#include <limits>

namespace holobf {

void SystemConfig::validate() const {
    if (num_users <= 0) throw ConfigError("num_users: must be positive");
    if (num_feeds <= 0) throw ConfigError("num_feeds: must be positive");
    if (num_feeds < num_users)
        throw ConfigError("num_feeds: must be >= num_users (got " +
                          std::to_string(num_feeds) + " < " + std::to_string(num_users) + ")");
    if (rhs_rows <= 0) throw ConfigError("rhs_rows: must be positive");
    if (rhs_cols <= 0) throw ConfigError("rhs_cols: must be positive");
    const long long m = static_cast<long long>(rhs_rows) * rhs_cols;
    if (m > std::numeric_limits<int>::max())
        throw ConfigError("rhs_rows*rhs_cols: element count overflows");
    if (!(carrier_freq_hz > 0.0)) throw ConfigError("carrier_freq_hz: must be > 0");
    if (!(element_spacing_m > 0.0)) throw ConfigError("element_spacing_m: must be > 0");
    if (!(k_free_mag > 0.0)) throw ConfigError("k_free_mag: must be > 0");
    if (!(k_surface_mag > 0.0)) throw ConfigError("k_surface_mag: must be > 0");
    if (k_surface_mag < k_free_mag)
        throw ConfigError("k_surface_mag: must be >= k_free_mag (substrate permittivity >= 1)");
    if (noise_vars.size() != num_users)
        throw ConfigError("noise_vars: need one variance per user");
    for (Eigen::Index d = 0; d < noise_vars.size(); ++d)
        if (!(noise_vars[d] > 0.0))
            throw ConfigError("noise_vars[" + std::to_string(d) + "]: must be > 0");
    if (!(power_budget > 0.0)) throw ConfigError("power_budget: must be > 0");
    if (num_paths <= 0) throw ConfigError("num_paths: must be positive");
}

}  // namespace holobf
