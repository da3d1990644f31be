#include "mmm/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mmm/asymptotics.hpp"
#include "mmm/implied_vol.hpp"

namespace mmm {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_grid_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty())
        raise(ErrorCode::domain, std::string(name) + " grid must be nonempty");
    for (double v : axis)
        if (!(v > 0.0))
            raise(ErrorCode::domain, std::string(name) + " grid must be positive");
    if (!std::is_sorted(axis.begin(), axis.end()))
        raise(ErrorCode::domain, std::string(name) + " grid must be sorted ascending");
}

} // namespace

bool SurfaceGrid::cell_ok(std::size_t row, std::size_t col) const {
    return std::none_of(failures.begin(), failures.end(), [&](const Failure& f) {
        return f.row == row && f.col == col;
    });
}

SurfaceGrid generate(const ModelParams& params, std::vector<double> strikes,
                     std::vector<double> expiries, int threads) {
    params.validate();
    check_grid_axis(strikes, "strike");
    check_grid_axis(expiries, "expiry");

    SurfaceGrid grid;
    grid.strikes = std::move(strikes);
    grid.expiries = std::move(expiries);
    grid.iv.assign(grid.expiries.size(), std::vector<double>(grid.strikes.size(), 0.0));
    grid.large_limit = large_time_limit(params);
    for (double K : grid.strikes)
        grid.small_limits.push_back(small_time_limit(params, K));

    const std::size_t n_cells = grid.expiries.size() * grid.strikes.size();
    std::vector<std::string> cell_status(n_cells); // empty = ok

    const auto run_cell = [&](std::size_t cell) {
        const std::size_t row = cell / grid.strikes.size();
        const std::size_t col = cell % grid.strikes.size();
        try {
            grid.iv[row][col] = implied_vol_mmm(params, grid.strikes[col], grid.expiries[row]).vol;
        } catch (const Error& e) {
            cell_status[cell] = to_string(e.code());
        }
    };

    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(n_cells)));
    if (n_workers == 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell)
            run_cell(cell);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t cell = static_cast<std::size_t>(w); cell < n_cells;
                     cell += static_cast<std::size_t>(n_workers))
                    run_cell(cell);
            });
        for (auto& t : pool)
            t.join();
    }

    // assemble failures in grid order regardless of execution order
    for (std::size_t cell = 0; cell < n_cells; ++cell)
        if (!cell_status[cell].empty())
            grid.failures.push_back({cell / grid.strikes.size(), cell % grid.strikes.size(),
                                     cell_status[cell]});
    return grid;
}

void export_grid(const SurfaceGrid& grid, ExportFormat format, std::ostream& out) {
    std::map<std::pair<std::size_t, std::size_t>, std::string> failed;
    for (const auto& f : grid.failures)
        failed[{f.row, f.col}] = f.code;
    const auto status_of = [&](std::size_t i, std::size_t j) {
        const auto it = failed.find({i, j});
        return it == failed.end() ? std::string("ok") : it->second;
    };

    if (format == ExportFormat::csv) {
        out << "expiry,strike,iv,small_limit,large_limit,status\n";
        for (std::size_t i = 0; i < grid.expiries.size(); ++i)
            for (std::size_t j = 0; j < grid.strikes.size(); ++j)
                out << fmt17(grid.expiries[i]) << ',' << fmt17(grid.strikes[j]) << ','
                    << fmt17(grid.iv[i][j]) << ',' << fmt17(grid.small_limits[j]) << ','
                    << fmt17(grid.large_limit) << ',' << status_of(i, j) << '\n';
        return;
    }

    nlohmann::ordered_json j;
    j["expiry"] = nlohmann::json::array();
    j["strike"] = nlohmann::json::array();
    j["iv"] = nlohmann::json::array();
    j["small_limit"] = nlohmann::json::array();
    j["large_limit"] = nlohmann::json::array();
    j["status"] = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.expiries.size(); ++i)
        for (std::size_t jj = 0; jj < grid.strikes.size(); ++jj) {
            j["expiry"].push_back(grid.expiries[i]);
            j["strike"].push_back(grid.strikes[jj]);
            j["iv"].push_back(grid.iv[i][jj]);
            j["small_limit"].push_back(grid.small_limits[jj]);
            j["large_limit"].push_back(grid.large_limit);
            j["status"].push_back(status_of(i, jj));
        }
    out << j.dump(2) << '\n';
}

void export_grid(const SurfaceGrid& grid, ExportFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        raise(ErrorCode::config, "export_grid: cannot open destination " + path);
    export_grid(grid, format, out);
    if (!out.good())
        raise(ErrorCode::config, "export_grid: write failure on " + path);
}

SurfaceGrid import_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "expiry,strike,iv,small_limit,large_limit,status")
        raise(ErrorCode::config, "import_csv: missing or unexpected header");

    struct Cell {
        double expiry, strike, iv, small_limit, large_limit;
        std::string status;
    };
    std::vector<Cell> cells;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        Cell c;
        char comma;
        ls >> c.expiry >> comma >> c.strike >> comma >> c.iv >> comma >> c.small_limit >>
            comma >> c.large_limit >> comma;
        std::getline(ls, c.status);
        if (ls.fail())
            raise(ErrorCode::config, "import_csv: malformed row: " + line);
        cells.push_back(c);
    }

    SurfaceGrid grid;
    for (const Cell& c : cells) {
        if (grid.expiries.empty() || c.expiry != grid.expiries.back())
            grid.expiries.push_back(c.expiry);
        if (grid.expiries.size() == 1) {
            grid.strikes.push_back(c.strike);
            grid.small_limits.push_back(c.small_limit);
        }
        grid.large_limit = c.large_limit;
    }
    grid.iv.assign(grid.expiries.size(), std::vector<double>(grid.strikes.size(), 0.0));
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const std::size_t row = idx / grid.strikes.size();
        const std::size_t col = idx % grid.strikes.size();
        if (row >= grid.expiries.size())
            raise(ErrorCode::config, "import_csv: ragged grid");
        grid.iv[row][col] = cells[idx].iv;
        if (cells[idx].status != "ok")
            grid.failures.push_back({row, col, cells[idx].status});
    }
    return grid;
}

} // namespace mmm
