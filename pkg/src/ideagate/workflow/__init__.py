from ideagate.workflow.engine import EngineConfig, WorkflowEngine
from ideagate.workflow.model import Proposal, SessionState

__all__ = ["EngineConfig", "WorkflowEngine", "Proposal", "SessionState"]
