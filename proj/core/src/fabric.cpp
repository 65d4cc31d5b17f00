#include "llsi/fabric.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace llsi {

using detail::format;
using detail::split;
using detail::tokens;
using detail::trim;

std::string family_name(Family f) {
    return f == Family::SeriesK ? "seriesk" : "seriesp";
}

Family family_from_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "seriesk") return Family::SeriesK;
    if (lower == "seriesp") return Family::SeriesP;
    throw ArgumentError("unknown family '" + std::string(name) + "'");
}

const FamilyTraits& family_traits(Family f) {
    static const FamilyTraits series_k{2, 4, 8, 6};
    static const FamilyTraits series_p{1, 12, 12, 4};
    return f == Family::SeriesK ? series_k : series_p;
}

std::string slice_name(Family f, int tile_col, int tile_row, int slice_index) {
    if (f == Family::SeriesK)
        return format("SLICE_X%dY%d", 2 * tile_col + slice_index, tile_row);
    return format("LC(%d,%d)", tile_col, tile_row);
}

std::string lut_name(Family f, int lut_index) {
    if (f == Family::SeriesK) {
        static const char* names[] = {"A6LUT", "B6LUT", "C6LUT", "D6LUT"};
        return names[lut_index];
    }
    return format("LUT%d", lut_index);
}

std::string ff_name(Family f, int ff_index) {
    if (f == Family::SeriesK) {
        static const char* names[] = {"AFF", "BFF", "CFF", "DFF",
                                      "A5FF", "B5FF", "C5FF", "D5FF"};
        return names[ff_index];
    }
    return format("FF%d", ff_index);
}

// ---- LutInit -----------------------------------------------------------

std::string LutInit::to_hex() const {
    int digits = std::max(1, (width + 3) / 4);
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%0*llx", digits, (unsigned long long)bits);
    return buf;
}

LutInit LutInit::from_hex(std::string_view hex, int arity) {
    if (detail::starts_with(hex, "0x") || detail::starts_with(hex, "0X"))
        hex.remove_prefix(2);
    if (hex.empty()) throw ParseError("empty init value");
    int width = 1 << arity;
    if ((int)hex.size() > (width + 3) / 4)
        throw ParseError(format("init '%s' wider than %d bits", std::string(hex).c_str(), width));
    uint64_t bits = 0;
    for (char c : hex) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else throw ParseError(format("bad hex digit '%c' in init", c));
        bits = (bits << 4) | uint64_t(d);
    }
    return {bits, width};
}

// ---- construction ------------------------------------------------------

static LUTConfig blank_lut(Family f, int index) {
    const auto& tr = family_traits(f);
    LUTConfig lut;
    lut.name = lut_name(f, index);
    lut.arity = tr.lut_arity;
    lut.init = {0, 1 << tr.lut_arity};
    lut.input_nets.assign(tr.lut_arity, "0");
    return lut;
}

static FFConfig blank_ff(Family f, int index) {
    FFConfig ff;
    ff.name = ff_name(f, index);
    ff.d_net = "0";
    return ff;
}

static Slice blank_slice(Family f, int col, int row, int s) {
    const auto& tr = family_traits(f);
    Slice sl;
    sl.name = slice_name(f, col, row, s);
    for (int i = 0; i < tr.luts_per_slice; ++i) sl.luts.push_back(blank_lut(f, i));
    for (int i = 0; i < tr.ffs_per_slice; ++i) sl.ffs.push_back(blank_ff(f, i));
    return sl;
}

static Tile blank_tile(Family f, int col, int row) {
    const auto& tr = family_traits(f);
    Tile t;
    t.col = col;
    t.row = row;
    for (int s = 0; s < tr.slices_per_tile; ++s)
        t.slices.push_back(blank_slice(f, col, row, s));
    return t;
}

FabricConfig make_blank_config(Family family, int grid_cols, int grid_rows, std::string name) {
    if (grid_cols < 1 || grid_rows < 1)
        throw ArgumentError(format("grid %dx%d must be at least 1x1", grid_cols, grid_rows));
    FabricConfig cfg;
    cfg.family = family;
    cfg.grid_cols = grid_cols;
    cfg.grid_rows = grid_rows;
    cfg.name = std::move(name);
    for (int row = 0; row < grid_rows; ++row)
        for (int col = 0; col < grid_cols; ++col)
            cfg.tiles.push_back(blank_tile(family, col, row));
    return cfg;
}

// ---- validation --------------------------------------------------------

namespace {

struct DriverRecord {
    std::string net;
    std::string source;
};

bool valid_net_name(std::string_view net) {
    if (net.empty()) return false;
    for (char c : net)
        if (!std::isalnum((unsigned char)c) && c != '_' && c != '.') return false;
    return true;
}

} // namespace

std::vector<Violation> validate(const FabricConfig& cfg) {
    std::vector<Violation> out;
    auto add = [&](ViolationKind k, std::string entity, std::string msg) {
        out.push_back({k, std::move(entity), std::move(msg)});
    };

    const auto& tr = family_traits(cfg.family);
    if (cfg.grid_cols < 1 || cfg.grid_rows < 1)
        add(ViolationKind::BadGrid, "grid",
            format("grid %dx%d must be at least 1x1", cfg.grid_cols, cfg.grid_rows));

    std::map<std::pair<int, int>, int> seen_tiles;
    for (const auto& t : cfg.tiles) {
        std::string tname = format("tile(%d,%d)", t.col, t.row);
        if (t.col < 0 || t.col >= cfg.grid_cols || t.row < 0 || t.row >= cfg.grid_rows)
            add(ViolationKind::TileOutOfBounds, tname, "tile coordinates outside grid");
        else if (++seen_tiles[{t.col, t.row}] > 1)
            add(ViolationKind::DuplicateTile, tname, "duplicate tile coordinates");

        if ((int)t.slices.size() != tr.slices_per_tile)
            add(ViolationKind::BadSliceCount, tname,
                format("expected %d slices, found %zu", tr.slices_per_tile, t.slices.size()));

        for (int s = 0; s < (int)t.slices.size(); ++s) {
            const Slice& sl = t.slices[s];
            std::string expect = slice_name(cfg.family, t.col, t.row, s);
            if (s < tr.slices_per_tile && sl.name != expect)
                add(ViolationKind::BadSliceName, sl.name, "expected slice name " + expect);

            if ((int)sl.luts.size() != tr.luts_per_slice)
                add(ViolationKind::BadElementCount, sl.name,
                    format("expected %d LUTs, found %zu", tr.luts_per_slice, sl.luts.size()));
            if ((int)sl.ffs.size() != tr.ffs_per_slice)
                add(ViolationKind::BadElementCount, sl.name,
                    format("expected %d FFs, found %zu", tr.ffs_per_slice, sl.ffs.size()));

            for (int i = 0; i < (int)sl.luts.size(); ++i) {
                const LUTConfig& lut = sl.luts[i];
                std::string lname = sl.name + "." + lut.name;
                if (i < tr.luts_per_slice && lut.name != lut_name(cfg.family, i))
                    add(ViolationKind::BadElementName, lname,
                        "expected LUT name " + lut_name(cfg.family, i));
                if (lut.arity != tr.lut_arity)
                    add(ViolationKind::BadArity, lname,
                        format("arity %d does not match family arity %d", lut.arity, tr.lut_arity));
                if (lut.init.width != (1 << lut.arity))
                    add(ViolationKind::BadInitWidth, lname,
                        format("init length %d, expected %d", lut.init.width, 1 << lut.arity));
                if ((int)lut.input_nets.size() != lut.arity)
                    add(ViolationKind::BadArity, lname,
                        format("%zu input nets for arity %d", lut.input_nets.size(), lut.arity));
                if (lut.used && lut.output_net.empty())
                    add(ViolationKind::MissingOutput, lname, "used LUT has no output net");
            }
            for (int i = 0; i < (int)sl.ffs.size(); ++i) {
                const FFConfig& ff = sl.ffs[i];
                std::string fname = sl.name + "." + ff.name;
                if (i < tr.ffs_per_slice && ff.name != ff_name(cfg.family, i))
                    add(ViolationKind::BadElementName, fname,
                        "expected FF name " + ff_name(cfg.family, i));
                if (ff.used && ff.q_net.empty())
                    add(ViolationKind::MissingOutput, fname, "used FF has no q net");
            }
        }

        std::map<std::string, int> sink_count;
        for (const auto& r : t.switchbox.routes)
            if (++sink_count[r.sink] > 1 && sink_count[r.sink] == 2)
                add(ViolationKind::DuplicateRouteSink, r.sink,
                    "net is the sink of more than one route in " + tname);
        if ((int)t.switchbox.routes.size() > t.switchbox.capacity)
            add(ViolationKind::RouteCapacityExceeded, tname,
                format("%zu routes exceed capacity %d", t.switchbox.routes.size(),
                       t.switchbox.capacity));
    }

    // completeness of the grid
    if (cfg.grid_cols >= 1 && cfg.grid_rows >= 1)
        for (int row = 0; row < cfg.grid_rows; ++row)
            for (int col = 0; col < cfg.grid_cols; ++col)
                if (!seen_tiles.count({col, row}))
                    add(ViolationKind::BadGrid, format("tile(%d,%d)", col, row), "tile missing");

    // driver accounting
    std::map<std::string, std::vector<std::string>> drivers;
    for (const auto& p : cfg.pins) {
        if (is_const_net(p.net))
            add(ViolationKind::ReservedNet, p.net, "pin redefines reserved constant net");
        else
            drivers[p.net].push_back("pin");
    }
    for (const auto& t : cfg.tiles) {
        for (const auto& sl : t.slices) {
            for (const auto& lut : sl.luts)
                if (lut.used && !lut.output_net.empty()) {
                    if (is_const_net(lut.output_net))
                        add(ViolationKind::ReservedNet, lut.output_net,
                            "LUT output drives reserved constant net");
                    else
                        drivers[lut.output_net].push_back(sl.name + "." + lut.name);
                }
            for (const auto& ff : sl.ffs)
                if (ff.used && !ff.q_net.empty()) {
                    if (is_const_net(ff.q_net))
                        add(ViolationKind::ReservedNet, ff.q_net,
                            "FF q drives reserved constant net");
                    else
                        drivers[ff.q_net].push_back(sl.name + "." + ff.name);
                }
        }
        for (const auto& r : t.switchbox.routes) {
            if (is_const_net(r.sink))
                add(ViolationKind::ReservedNet, r.sink, "route drives reserved constant net");
            else
                drivers[r.sink].push_back(format("route %s->%s in tile(%d,%d)", r.src.c_str(),
                                                 r.sink.c_str(), t.col, t.row));
        }
    }
    for (const auto& [net, who] : drivers)
        if (who.size() > 1) {
            std::string msg = "net driven by:";
            for (const auto& w : who) msg += " " + w + ";";
            add(ViolationKind::MultiplyDrivenNet, net, msg);
        }

    auto check_driven = [&](const std::string& net, const std::string& user) {
        if (net.empty() || is_const_net(net)) return;
        if (!drivers.count(net))
            add(ViolationKind::UndrivenNet, net, "referenced by " + user + " but never driven");
    };
    for (const auto& t : cfg.tiles) {
        for (const auto& sl : t.slices) {
            for (const auto& lut : sl.luts)
                if (lut.used)
                    for (const auto& in : lut.input_nets)
                        check_driven(in, sl.name + "." + lut.name);
            for (const auto& ff : sl.ffs)
                if (ff.used) check_driven(ff.d_net, sl.name + "." + ff.name);
        }
        for (const auto& r : t.switchbox.routes)
            check_driven(r.src, format("route in tile(%d,%d)", t.col, t.row));
    }

    return out;
}

// ---- parsing -----------------------------------------------------------

namespace {

// Source location of the line being parsed; columns are recovered from the
// raw text so errors can point at the offending token.
struct LineCtx {
    std::string raw;
    int line = 0;

    int col_of(const std::string& tok) const {
        auto pos = raw.find(tok);
        return pos == std::string::npos ? 1 : int(pos) + 1;
    }
    [[noreturn]] void fail(const std::string& msg, const std::string& tok) const {
        throw ParseError(msg, line, col_of(tok));
    }
};

struct KeyValues {
    std::map<std::string, std::string> kv;
    LineCtx ctx;

    const std::string& require(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) ctx.fail("missing attribute '" + key + "'", key);
        return it->second;
    }
};

KeyValues parse_attrs(const std::vector<std::string>& toks, size_t from, const LineCtx& ctx) {
    KeyValues out;
    out.ctx = ctx;
    for (size_t i = from; i < toks.size(); ++i) {
        size_t eq = toks[i].find('=');
        if (eq == std::string::npos)
            ctx.fail("expected key=value, got '" + toks[i] + "'", toks[i]);
        out.kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
    }
    return out;
}

int parse_int(const std::string& s, const LineCtx& ctx) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        ctx.fail("expected integer, got '" + s + "'", s);
    }
}

bool parse_bit(const std::string& s, const LineCtx& ctx) {
    if (s == "0") return false;
    if (s == "1") return true;
    ctx.fail("expected 0 or 1, got '" + s + "'", s);
}

std::string parse_net(const std::string& s, const LineCtx& ctx) {
    if (s == "-") return {};
    if (!valid_net_name(s)) ctx.fail("bad net id '" + s + "'", s);
    return s;
}

} // namespace

FabricConfig parse_fabric_config(std::string_view text) {
    FabricConfig cfg;
    bool have_family = false, have_grid = false;

    // declared content, merged over the blank grid once the header is known
    struct PendingTile {
        int col, row;
        int decl_line;
        std::optional<int> capacity;
        std::vector<Route> routes;
        // slice name -> list of element lines
        std::vector<std::pair<std::string, KeyValues>> luts;  // owning slice recorded in kv["__slice"]
        std::vector<std::pair<std::string, KeyValues>> ffs;
        std::vector<std::pair<std::string, int>> slices;  // declared slice names
    };
    std::vector<PendingTile> pending;
    int cur_tile_idx = -1;
    auto cur_tile = [&]() -> PendingTile* {
        return cur_tile_idx < 0 ? nullptr : &pending[cur_tile_idx];
    };
    std::string cur_slice;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        LineCtx ctx{raw, lineno};
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto toks = tokens(line);
        const std::string& kw = toks[0];

        if (kw == "family") {
            if (toks.size() != 2) ctx.fail("family takes one value", kw);
            try {
                cfg.family = family_from_name(toks[1]);
            } catch (const ArgumentError& e) {
                ctx.fail(e.what(), toks[1]);
            }
            have_family = true;
        } else if (kw == "grid") {
            if (toks.size() != 2) ctx.fail("grid takes one value like 4x3", kw);
            auto x = toks[1].find('x');
            if (x == std::string::npos) ctx.fail("grid must be <cols>x<rows>", toks[1]);
            cfg.grid_cols = parse_int(toks[1].substr(0, x), ctx);
            cfg.grid_rows = parse_int(toks[1].substr(x + 1), ctx);
            have_grid = true;
        } else if (kw == "name") {
            cfg.name = std::string(trim(line.substr(4)));
        } else if (kw == "pin") {
            if (toks.size() != 3) ctx.fail("pin takes <net> <0|1>", kw);
            std::string net = parse_net(toks[1], ctx);
            if (net.empty()) ctx.fail("pin net must not be '-'", toks[1]);
            cfg.pins.push_back({net, parse_bit(toks[2], ctx)});
        } else if (kw == "tile") {
            if (toks.size() != 3) ctx.fail("tile takes <col> <row>", kw);
            pending.push_back({parse_int(toks[1], ctx), parse_int(toks[2], ctx), lineno,
                               {}, {}, {}, {}, {}});
            cur_tile_idx = (int)pending.size() - 1;
            cur_slice.clear();
        } else if (kw == "switchbox") {
            if (!cur_tile()) ctx.fail("switchbox outside a tile block", kw);
            auto attrs = parse_attrs(toks, 1, ctx);
            cur_tile()->capacity = parse_int(attrs.require("capacity"), ctx);
        } else if (kw == "slice") {
            if (!cur_tile()) ctx.fail("slice outside a tile block", kw);
            if (toks.size() != 2) ctx.fail("slice takes <name>", kw);
            cur_slice = toks[1];
            cur_tile()->slices.push_back({cur_slice, lineno});
        } else if (kw == "lut") {
            if (!cur_tile() || cur_slice.empty()) ctx.fail("lut outside a slice block", kw);
            if (toks.size() < 2) ctx.fail("lut takes <name> key=value...", kw);
            auto attrs = parse_attrs(toks, 2, ctx);
            attrs.kv["__slice"] = cur_slice;
            cur_tile()->luts.push_back({toks[1], attrs});
        } else if (kw == "ff") {
            if (!cur_tile() || cur_slice.empty()) ctx.fail("ff outside a slice block", kw);
            if (toks.size() < 2) ctx.fail("ff takes <name> key=value...", kw);
            auto attrs = parse_attrs(toks, 2, ctx);
            attrs.kv["__slice"] = cur_slice;
            cur_tile()->ffs.push_back({toks[1], attrs});
        } else if (kw == "route") {
            if (!cur_tile()) ctx.fail("route outside a tile block", kw);
            if (toks.size() != 2) ctx.fail("route takes <src>-><sink>", kw);
            auto arrow = toks[1].find("->");
            if (arrow == std::string::npos) ctx.fail("route must be <src>-><sink>", toks[1]);
            std::string src = parse_net(toks[1].substr(0, arrow), ctx);
            std::string sink = parse_net(toks[1].substr(arrow + 2), ctx);
            if (src.empty() || sink.empty()) ctx.fail("route nets must not be empty", toks[1]);
            cur_tile()->routes.push_back({src, sink});
        } else {
            ctx.fail("unknown keyword '" + kw + "'", kw);
        }
    }

    if (!have_family) throw ParseError("missing 'family' line");
    if (!have_grid) throw ParseError("missing 'grid' line");
    if (cfg.grid_cols < 1 || cfg.grid_rows < 1)
        throw ParseError(format("grid %dx%d must be at least 1x1", cfg.grid_cols, cfg.grid_rows));

    FabricConfig base = make_blank_config(cfg.family, cfg.grid_cols, cfg.grid_rows, cfg.name);
    cfg.tiles = std::move(base.tiles);
    const auto& tr = family_traits(cfg.family);

    std::set<std::string> defined;

    for (auto& pt : pending) {
        if (pt.col < 0 || pt.col >= cfg.grid_cols || pt.row < 0 || pt.row >= cfg.grid_rows)
            throw ParseError(format("tile (%d,%d) outside grid %dx%d", pt.col, pt.row,
                                    cfg.grid_cols, cfg.grid_rows),
                             pt.decl_line);
        Tile& tile = cfg.tiles[size_t(pt.row) * cfg.grid_cols + pt.col];
        if (pt.capacity) tile.switchbox.capacity = *pt.capacity;
        for (auto& r : pt.routes) tile.switchbox.routes.push_back(std::move(r));

        auto slice_index = [&](const std::string& name, int line) {
            for (int s = 0; s < tr.slices_per_tile; ++s)
                if (slice_name(cfg.family, pt.col, pt.row, s) == name) return s;
            throw ParseError(format("slice '%s' not valid for tile (%d,%d)", name.c_str(),
                                    pt.col, pt.row),
                             line);
        };
        for (auto& [name, line] : pt.slices) slice_index(name, line);

        for (auto& [name, attrs] : pt.luts) {
            int s = slice_index(attrs.kv["__slice"], attrs.ctx.line);
            Slice& sl = tile.slices[s];
            auto it = std::find_if(sl.luts.begin(), sl.luts.end(),
                                   [&](const LUTConfig& l) { return l.name == name; });
            if (it == sl.luts.end())
                attrs.ctx.fail(format("unknown LUT '%s' in %s", name.c_str(), sl.name.c_str()),
                               name);
            if (!defined.insert(sl.name + "." + name).second)
                attrs.ctx.fail(format("duplicate definition of %s.%s", sl.name.c_str(),
                                      name.c_str()),
                               name);
            LUTConfig& lut = *it;
            lut.arity = parse_int(attrs.require("arity"), attrs.ctx);
            if (lut.arity < 1 || lut.arity > 6) attrs.ctx.fail("arity must be in 1..6", "arity");
            try {
                lut.init = LutInit::from_hex(attrs.require("init"), lut.arity);
            } catch (const ParseError& e) {
                attrs.ctx.fail(e.what(), "init");
            }
            lut.input_nets.clear();
            std::string ins = attrs.require("in");
            if (ins != "-" && !ins.empty())
                for (auto& n : split(ins, ','))
                    lut.input_nets.push_back(n.empty() ? "0" : parse_net(n, attrs.ctx));
            if ((int)lut.input_nets.size() > lut.arity)
                attrs.ctx.fail(format("%zu inputs exceed arity %d", lut.input_nets.size(),
                                      lut.arity),
                               "in");
            while ((int)lut.input_nets.size() < lut.arity) lut.input_nets.push_back("0");
            for (auto& n : lut.input_nets)
                if (n.empty()) n = "0";
            lut.output_net = parse_net(attrs.require("out"), attrs.ctx);
            lut.used = parse_bit(attrs.require("used"), attrs.ctx);
        }
        for (auto& [name, attrs] : pt.ffs) {
            int s = slice_index(attrs.kv["__slice"], attrs.ctx.line);
            Slice& sl = tile.slices[s];
            auto it = std::find_if(sl.ffs.begin(), sl.ffs.end(),
                                   [&](const FFConfig& f) { return f.name == name; });
            if (it == sl.ffs.end())
                attrs.ctx.fail(format("unknown FF '%s' in %s", name.c_str(), sl.name.c_str()),
                               name);
            if (!defined.insert(sl.name + "." + name).second)
                attrs.ctx.fail(format("duplicate definition of %s.%s", sl.name.c_str(),
                                      name.c_str()),
                               name);
            FFConfig& ff = *it;
            ff.state = parse_bit(attrs.require("state"), attrs.ctx);
            ff.d_net = parse_net(attrs.require("d"), attrs.ctx);
            if (ff.d_net.empty()) ff.d_net = "0";
            ff.q_net = parse_net(attrs.require("q"), attrs.ctx);
            ff.used = parse_bit(attrs.require("used"), attrs.ctx);
        }
    }

    // canonical order
    std::sort(cfg.pins.begin(), cfg.pins.end());
    for (auto& t : cfg.tiles) std::sort(t.switchbox.routes.begin(), t.switchbox.routes.end());

    auto violations = validate(cfg);
    if (!violations.empty()) {
        std::string msg = "invalid fabric config:";
        for (const auto& v : violations) msg += "\n  " + v.entity + ": " + v.message;
        throw InvariantError(msg);
    }
    return cfg;
}

std::string serialize_fabric_config(const FabricConfig& cfg) {
    std::string out;
    out += "family " + family_name(cfg.family) + "\n";
    if (!cfg.name.empty()) out += "name " + cfg.name + "\n";
    out += format("grid %dx%d\n", cfg.grid_cols, cfg.grid_rows);

    auto pins = cfg.pins;
    std::sort(pins.begin(), pins.end());
    for (const auto& p : pins) out += format("pin %s %d\n", p.net.c_str(), p.value ? 1 : 0);

    auto tiles = cfg.tiles;
    std::sort(tiles.begin(), tiles.end(), [](const Tile& a, const Tile& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (const auto& t : tiles) {
        out += format("tile %d %d\n", t.col, t.row);
        out += format("  switchbox capacity=%d\n", t.switchbox.capacity);
        for (const auto& sl : t.slices) {
            out += "  slice " + sl.name + "\n";
            for (const auto& lut : sl.luts) {
                std::string ins;
                for (size_t i = 0; i < lut.input_nets.size(); ++i) {
                    if (i) ins += ",";
                    ins += lut.input_nets[i];
                }
                out += format("    lut %s arity=%d init=%s in=%s out=%s used=%d\n",
                              lut.name.c_str(), lut.arity, lut.init.to_hex().c_str(),
                              ins.empty() ? "-" : ins.c_str(),
                              lut.output_net.empty() ? "-" : lut.output_net.c_str(),
                              lut.used ? 1 : 0);
            }
            for (const auto& ff : sl.ffs)
                out += format("    ff %s state=%d d=%s q=%s used=%d\n", ff.name.c_str(),
                              ff.state ? 1 : 0, ff.d_net.empty() ? "-" : ff.d_net.c_str(),
                              ff.q_net.empty() ? "-" : ff.q_net.c_str(), ff.used ? 1 : 0);
        }
        auto routes = t.switchbox.routes;
        std::sort(routes.begin(), routes.end());
        for (const auto& r : routes)
            out += format("  route %s->%s\n", r.src.c_str(), r.sink.c_str());
    }
    return out;
}

FabricConfig load_fabric_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open fabric config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_fabric_config(ss.str());
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_fabric_config(const FabricConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write fabric config '" + path + "'");
    out << serialize_fabric_config(cfg);
    if (!out) throw Error("short write to '" + path + "'");
}

// ---- element addressing -------------------------------------------------

std::optional<ElementIndex> find_element(const FabricConfig& cfg, std::string_view name) {
    if (detail::starts_with(name, "SBOX(")) {
        int col, row;
        if (std::sscanf(std::string(name).c_str(), "SBOX(%d,%d)", &col, &row) != 2)
            return std::nullopt;
        for (int t = 0; t < (int)cfg.tiles.size(); ++t)
            if (cfg.tiles[t].col == col && cfg.tiles[t].row == row)
                return ElementIndex{t, -1, -1, ElementIndex::Kind::SwitchBox};
        return std::nullopt;
    }
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos) return std::nullopt;
    std::string slice(name.substr(0, dot));
    std::string element(name.substr(dot + 1));
    for (int t = 0; t < (int)cfg.tiles.size(); ++t) {
        for (int s = 0; s < (int)cfg.tiles[t].slices.size(); ++s) {
            const Slice& sl = cfg.tiles[t].slices[s];
            if (sl.name != slice) continue;
            for (int i = 0; i < (int)sl.luts.size(); ++i)
                if (sl.luts[i].name == element)
                    return ElementIndex{t, s, i, ElementIndex::Kind::Lut};
            for (int i = 0; i < (int)sl.ffs.size(); ++i)
                if (sl.ffs[i].name == element)
                    return ElementIndex{t, s, i, ElementIndex::Kind::Ff};
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::string element_display_name(const FabricConfig& cfg, const ElementIndex& idx) {
    const Tile& t = cfg.tiles.at(idx.tile);
    if (idx.kind == ElementIndex::Kind::SwitchBox)
        return format("SBOX(%d,%d)", t.col, t.row);
    const Slice& sl = t.slices.at(idx.slice);
    if (idx.kind == ElementIndex::Kind::Lut) return sl.name + "." + sl.luts.at(idx.element).name;
    return sl.name + "." + sl.ffs.at(idx.element).name;
}

} // namespace llsi
