#pragma once

namespace tllreach {

/// Numerical tolerances shared by every module. The defaults are used
/// throughout unless a caller passes its own copy.
struct Tolerances {
    double feasibility = 1e-9;   ///< constraint violation accepted on LP points
    double lp = 1e-9;            ///< objective accuracy of reported LP optima
    double singular = 1e-12;     ///< |det M| <= singular * ||M|| selects the FM path
    double cell = 1e-8;          ///< minimum inscribed radius of an arrangement cell
    double dedup = 1e-9;         ///< hyperplane duplicate detection after normalization
};

}  // namespace tllreach
