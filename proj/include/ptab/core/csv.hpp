#pragma once

#include "ptab/core/data.hpp"

#include <filesystem>
#include <iosfwd>

namespace ptab {

// CSV layouts (UTF-8, comma separated, '.' decimal point):
//   i.i.d. : y,a,x1,...,xp
//   panel  : day,t,a,y,x1,...,xd   rows sorted by (day, t), t = 1..T per day
// Numbers are written with 17 significant digits so a load/write cycle is exact.

/// @throws ParseError naming the line; std::invalid_argument if fewer than 2 rows.
[[nodiscard]] IidDataset load_iid_csv(const std::filesystem::path& path);
[[nodiscard]] IidDataset read_iid_csv(std::istream& in);
void write_iid_csv(const std::filesystem::path& path, const IidDataset& data);
void write_iid_csv(std::ostream& out, const IidDataset& data);

/// @throws ParseError for malformed cells, SchemaError for layout violations.
[[nodiscard]] PanelDataset load_panel_csv(const std::filesystem::path& path);
[[nodiscard]] PanelDataset read_panel_csv(std::istream& in);
void write_panel_csv(const std::filesystem::path& path, const PanelDataset& panel);
void write_panel_csv(std::ostream& out, const PanelDataset& panel);

}  // namespace ptab
