import pytest

from updyn.utils import slack
from updyn.utils.slack import (
    MAX_MESSAGE_LENGTH,
    SLACK_TOKEN_ENV,
    SlackClient,
    resolve_token,
    slack_notifications,
)


class FakeWebClient:
    instances = []

    def __init__(self, token):
        self.token = token
        self.calls = []
        FakeWebClient.instances.append(self)

    def users_list(self, cursor=None, limit=100):
        self.calls.append(("users_list", cursor))
        if cursor is None:
            members = [
                {"deleted": False, "is_bot": False, "id": "U1", "profile": {"display_name": "alice"}},
                {"deleted": False, "is_bot": True, "id": "B1", "profile": {"display_name": "bot"}},
            ]
            return {"members": members, "response_metadata": {"next_cursor": "page2"}}
        members = [{"deleted": True, "is_bot": False, "id": "U2", "profile": {"display_name": "bob"}}]
        return {"members": members, "response_metadata": {"next_cursor": ""}}

    def conversations_open(self, users):
        self.calls.append(("conversations_open", tuple(users)))
        return {"channel": {"id": f"D-{users[0]}"}}

    def chat_postMessage(self, **kwargs):
        self.calls.append(("chat_postMessage", kwargs))

    def files_upload(self, **kwargs):
        self.calls.append(("files_upload", kwargs))


@pytest.fixture
def fake_slack(monkeypatch):
    FakeWebClient.instances = []
    monkeypatch.setattr(slack, "WebClient", FakeWebClient)
    return FakeWebClient


def calls(fake, name):
    return [kwargs for instance in fake.instances for (call, kwargs) in instance.calls if call == name]


class TestSlackClient:
    def test_channel_message(self, fake_slack):
        SlackClient("token").send_message("#runs", "done")
        assert calls(fake_slack, "chat_postMessage") == [{"channel": "#runs", "text": "done", "parse": "full"}]

    def test_user_lookup_pages_through_members(self, fake_slack):
        SlackClient("token").send_message(["@alice"], "done")
        assert calls(fake_slack, "users_list") == [None, "page2"]
        assert calls(fake_slack, "chat_postMessage")[0]["channel"] == "D-U1"

    def test_unknown_user(self, fake_slack):
        with pytest.raises(ValueError):
            SlackClient("token").send_message("@bob", "done")

    def test_long_message_becomes_a_snippet(self, fake_slack):
        SlackClient("token").send_message("#runs", "x" * (MAX_MESSAGE_LENGTH + 1))
        assert calls(fake_slack, "chat_postMessage") == []
        assert calls(fake_slack, "files_upload")[0]["filename"] == "message.txt"

    def test_report_upload(self, fake_slack):
        SlackClient("token").send_report("#runs", "{}", comment="certify report")
        upload = calls(fake_slack, "files_upload")[0]
        assert upload["content"] == "{}"
        assert upload["initial_comment"] == "certify report"


class TestNotifications:
    def test_token_from_environment(self, monkeypatch):
        monkeypatch.setenv(SLACK_TOKEN_ENV, "from-env")
        assert resolve_token(None) == "from-env"
        assert resolve_token("explicit") == "explicit"

    def test_silent_without_token(self, fake_slack, no_slack_token):
        with slack_notifications(None, ["#runs"]) as outcome:
            outcome["summary"] = "ok"
        assert fake_slack.instances == []

    def test_silent_without_recipients(self, fake_slack):
        with slack_notifications("token", None):
            pass
        assert fake_slack.instances == []

    def test_success_posts_summary_and_report(self, fake_slack):
        with slack_notifications("token", "#runs") as outcome:
            outcome["summary"] = "certified 8 levels"
            outcome["report"] = '{"command": "certify"}'
        assert "certified 8 levels" in calls(fake_slack, "chat_postMessage")[0]["text"]
        assert calls(fake_slack, "files_upload")[0]["content"] == '{"command": "certify"}'

    def test_failure_uploads_traceback(self, fake_slack):
        with pytest.raises(RuntimeError):
            with slack_notifications("token", "#runs"):
                raise RuntimeError("horizon exhausted")
        upload = calls(fake_slack, "files_upload")[0]
        assert "horizon exhausted" in upload["content"]
        assert upload["filename"].startswith("error_")
