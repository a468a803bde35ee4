"""Online social network census: crawl, demographics, tie mixing and structure."""
__version__ = "0.1.0"

from .model import (CivilStatus, EdgeStore, FriendshipEdge, Gender, MemberRecord, MemberStore,
                    canonicalize_edges, load_edges, load_members, save_edges, save_members,
                    save_store, validate_record)

__all__ = [
    "CivilStatus", "EdgeStore", "FriendshipEdge", "Gender", "MemberRecord", "MemberStore",
    "canonicalize_edges", "load_edges", "load_members", "save_edges", "save_members",
    "save_store", "validate_record",
]
