#pragma once

// CbC-Block: introducing a specified named block and instantiating it.

#include <string>
#include <vector>

#include "cbc/kernel/parser.hpp"
#include "cbc/refine/tree.hpp"

namespace cbc {

/// Replaces an open abstract node by a reference to a new block with the
/// given contract; obligations pre => pre' and post' => post.
MethodUnit introduce_block(const MethodUnit& u, const std::string& node, const std::string& name,
                           const Predicate& pre, const Predicate& post,
                           const std::vector<std::string>& accessible,
                           const std::vector<std::string>& assignable);

/// Records the instantiation of an open block. `nested` are the frames of
/// block statements inside `stmts`; each becomes a new open block. The
/// obligation is pre => wp(body, post) with nested blocks treated opaquely.
MethodUnit instantiate_block(const MethodUnit& u, const std::string& name, const Statement& stmts,
                             const std::vector<BlockFrameDecl>& nested = {});

BlockMethod block_to_method(const MethodUnit& u, const std::string& name);

/// Frames of every block of the unit, for wp of statements that refer to them.
std::map<std::string, BlockFrame, std::less<>> block_frames(const MethodUnit& u);

/// The block's instantiation with nested blocks inlined recursively; an
/// uninstantiated block stays a block reference.
Statement inline_block(const MethodUnit& u, const std::string& name);

}  // namespace cbc
