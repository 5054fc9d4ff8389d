from ideagate.session.store import LogEvent, SessionStore, canonical_json

__all__ = ["LogEvent", "SessionStore", "canonical_json"]
