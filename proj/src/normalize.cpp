#include "mgen/equiv.hpp"

#include <algorithm>
#include <cctype>

namespace mgen {

namespace {

enum class PieceKind { Code, Literal };

struct Piece {
    PieceKind kind;
    std::string text;
};

struct Lexed {
    std::vector<Piece> pieces;
    bool unterminated_comment = false;
};

bool starts_with_at(std::string_view s, std::size_t i, std::string_view what) {
    return !what.empty() && s.compare(i, what.size(), what) == 0;
}

// Splits source into code and literal runs; comments become whitespace that
// keeps the comment's newlines.
Lexed lex(std::string_view src, const CommentGrammar& g) {
    Lexed out;
    std::string code;
    auto flush_code = [&] {
        if (!code.empty()) out.pieces.push_back({PieceKind::Code, std::move(code)});
        code.clear();
    };

    std::size_t i = 0;
    while (i < src.size()) {
        // Longest opener wins, so `"""` beats `"` and `/*` beats a `/` prefix.
        enum class Hit { None, Line, Block, Literal } hit = Hit::None;
        std::size_t best = 0;
        std::size_t which = 0;
        for (std::size_t k = 0; k < g.line_prefixes.size(); ++k) {
            const auto& p = g.line_prefixes[k];
            if (p.size() > best && starts_with_at(src, i, p)) hit = Hit::Line, best = p.size(), which = k;
        }
        for (std::size_t k = 0; k < g.blocks.size(); ++k) {
            const auto& p = g.blocks[k].open;
            if (p.size() > best && starts_with_at(src, i, p)) hit = Hit::Block, best = p.size(), which = k;
        }
        for (std::size_t k = 0; k < g.literals.size(); ++k) {
            const auto& p = g.literals[k].open;
            if (p.size() > best && starts_with_at(src, i, p)) hit = Hit::Literal, best = p.size(), which = k;
        }

        switch (hit) {
            case Hit::None:
                code.push_back(src[i]);
                ++i;
                break;
            case Hit::Line: {
                const auto nl = src.find('\n', i);
                code.push_back(' ');
                i = nl == std::string_view::npos ? src.size() : nl;
                break;
            }
            case Hit::Block: {
                const auto& close = g.blocks[which].close;
                const auto end = src.find(close, i + best);
                const auto stop = end == std::string_view::npos ? src.size() : end + close.size();
                if (end == std::string_view::npos) out.unterminated_comment = true;
                code.push_back(' ');
                code.append(static_cast<std::size_t>(std::count(src.begin() + i, src.begin() + stop, '\n')), '\n');
                i = stop;
                break;
            }
            case Hit::Literal: {
                const auto& lit = g.literals[which];
                std::size_t j = i + best;
                while (j < src.size()) {
                    if (lit.backslash_escapes && src[j] == '\\' && j + 1 < src.size()) {
                        j += 2;
                        continue;
                    }
                    if (starts_with_at(src, j, lit.close)) {
                        j += lit.close.size();
                        break;
                    }
                    if (!lit.multiline && src[j] == '\n') break;
                    ++j;
                }
                j = std::min(j, src.size());
                flush_code();
                out.pieces.push_back({PieceKind::Literal, std::string(src.substr(i, j - i))});
                i = j;
                break;
            }
        }
    }
    flush_code();
    return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

NormalizedForm strip_comments(std::string_view source, const CommentGrammar& grammar) {
    const auto lexed = lex(source, grammar);
    enum class Pending { None, Space, Newline } pending = Pending::None;
    std::string out;
    auto flush = [&] {
        if (!out.empty()) {
            if (pending == Pending::Newline) out.push_back('\n');
            else if (pending == Pending::Space) out.push_back(' ');
        }
        pending = Pending::None;
    };
    for (const auto& piece : lexed.pieces) {
        if (piece.kind == PieceKind::Literal) {
            flush();
            out += piece.text;
            continue;
        }
        for (char c : piece.text) {
            if (is_space(c)) {
                if (c == '\n') pending = Pending::Newline;
                else if (pending == Pending::None) pending = Pending::Space;
                continue;
            }
            flush();
            out.push_back(c);
        }
    }
    return {std::move(out), lexed.unterminated_comment};
}

std::string remove_comments(std::string_view source, const CommentGrammar& grammar) {
    std::string out;
    for (const auto& piece : lex(source, grammar).pieces) out += piece.text;
    return out;
}

}  // namespace mgen
