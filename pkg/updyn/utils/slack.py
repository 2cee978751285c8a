import logging
import os
import sys
import time
import traceback
import typing
from contextlib import contextmanager

from slack import WebClient

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

SLACK_TOKEN_ENV = "UPDYN_SLACK_TOKEN"
"""
Environment variable consulted when no token is passed on the command line.
"""

MAX_MESSAGE_LENGTH = 4000
"""
Longer messages are uploaded as text snippets.
"""

Recipients = typing.Union[str, typing.Iterable[str]]


class SlackClient:
    """
    Posts run summaries and report documents to Slack channels ('#name') or users ('@name').

    :param token: Slack API token
    """

    def __init__(self, token: str):
        self._client = WebClient(token=token)
        self._user_ids: typing.Optional[typing.Dict[str, str]] = None

    def _load_user_ids(self) -> typing.Dict[str, str]:
        user_ids, cursor = {}, None
        while True:
            response = self._client.users_list(cursor=cursor, limit=100)
            for member in response["members"]:
                if not (member["deleted"] or member["is_bot"]):
                    user_ids[member["profile"]["display_name"]] = member["id"]
            cursor = response["response_metadata"]["next_cursor"]
            if not cursor:
                return user_ids

    def _channel(self, recipient: str) -> str:
        if not recipient.startswith("@"):
            return recipient
        if self._user_ids is None:
            self._user_ids = self._load_user_ids()
        name = recipient[1:]
        if name not in self._user_ids:
            raise ValueError(f"User '{name}' not found in this workspace")
        response = self._client.conversations_open(users=[self._user_ids[name]])
        return response["channel"]["id"]

    def send_message(self, to: Recipients, message: str):
        """
        Send a message, as a snippet when it is too long for a chat message.

        :param to: Channel(s) and/or user(s)
        :param message: Message text
        """
        for recipient in [to] if isinstance(to, str) else to:
            channel = self._channel(recipient)
            if len(message) > MAX_MESSAGE_LENGTH:
                self.send_report(recipient, message, filename="message.txt")
            else:
                self._client.chat_postMessage(channel=channel, text=message, parse="full")

    def send_report(
        self,
        to: Recipients,
        content: str,
        filename: str = "report.json",
        comment: typing.Optional[str] = None,
    ):
        """
        Upload a report document.

        :param to: Channel(s) and/or user(s)
        :param content: Document text
        :param filename: Name shown in Slack
        :param comment: Text posted with the file
        """
        for recipient in [to] if isinstance(to, str) else to:
            optional_args = {"initial_comment": comment} if comment else {}
            self._client.files_upload(
                channels=self._channel(recipient),
                content=content,
                filename=filename,
                filetype="text",
                **optional_args,
            )


def resolve_token(token: typing.Optional[str]) -> typing.Optional[str]:
    """
    The explicit token, else the one in the environment.
    """
    return token or os.environ.get(SLACK_TOKEN_ENV)


@contextmanager
def slack_notifications(token: typing.Optional[str], to: typing.Optional[Recipients]):
    """
    Notify Slack when an updyn command finishes.

    The block may set ``outcome["summary"]`` and ``outcome["report"]``; on success the summary is
    posted and the report attached. If the block raises, the stack trace is uploaded instead.
    Without a token or recipients nothing is sent.

    :param token: Slack API token (falls back to ``UPDYN_SLACK_TOKEN``)
    :param to: Channel(s) and/or user(s)
    """
    token = resolve_token(token)
    outcome: typing.Dict[str, str] = {}
    if not (token and to):
        yield outcome
        return

    process = " ".join([os.path.basename(sys.argv[0])] + sys.argv[1:2])
    try:
        yield outcome
        client = SlackClient(token)
        summary = outcome.get("summary", "finished")
        client.send_message(to, f":white_check_mark: {process}: {summary}")
        if "report" in outcome:
            client.send_report(to, outcome["report"], comment=f"{process} report")
    except Exception:
        logger.warning(f"{process} failed; sending stack trace to Slack")
        SlackClient(token).send_report(
            to,
            traceback.format_exc(),
            filename=f"error_{time.strftime('%Y-%m-%d_%H:%M')}.log",
            comment=f":x: Error in {process}",
        )
        raise
