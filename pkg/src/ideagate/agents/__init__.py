from ideagate.agents.parsing import BinaryAnswer, BulletList, parse_binary_answer, parse_bullets
from ideagate.agents.runtime import AgentRuntime, CompletionResult, PersonaConfig
from ideagate.agents.templates import Message, PromptTemplate, TEMPLATES, get_template, render_prompt, transcript

__all__ = [
    "BinaryAnswer",
    "BulletList",
    "parse_binary_answer",
    "parse_bullets",
    "AgentRuntime",
    "CompletionResult",
    "PersonaConfig",
    "Message",
    "PromptTemplate",
    "TEMPLATES",
    "get_template",
    "render_prompt",
    "transcript",
]
