#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "mmm/errors.hpp"
#include "mmm/mmm_core.hpp"

namespace mmm {

// Rectangular strike x expiry implied-vol grid with the closed-form limit
// overlays. iv is row-major with row = expiry, column = strike; failed cells
// keep iv = 0 and are listed in `failures`.
struct SurfaceGrid {
    std::vector<double> strikes;
    std::vector<double> expiries;
    std::vector<std::vector<double>> iv;
    std::vector<double> small_limits; // per strike
    double large_limit = 0.0;

    struct Failure {
        std::size_t row = 0;
        std::size_t col = 0;
        std::string code;
    };
    std::vector<Failure> failures;

    bool cell_ok(std::size_t row, std::size_t col) const;
};

enum class ExportFormat { csv, json };

// Cell-wise implied_vol_mmm over the grid; deterministic, cell failures are
// recorded rather than fatal. `threads` bounds worker parallelism; the result
// is identical for any value.
SurfaceGrid generate(const ModelParams& params, std::vector<double> strikes,
                     std::vector<double> expiries, int threads = 1);

// Long-format export, one row per cell:
//   expiry,strike,iv,small_limit,large_limit,status
// numbers carry 17 significant digits so a reload is bit-exact. JSON mirrors
// the same schema as an object with arrays.
void export_grid(const SurfaceGrid& grid, ExportFormat format, std::ostream& out);
void export_grid(const SurfaceGrid& grid, ExportFormat format, const std::string& path);

// Parse of the CSV schema above (round-trip counterpart of export_grid).
SurfaceGrid import_csv(std::istream& in);

} // namespace mmm
