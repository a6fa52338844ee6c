import requests
from typing import List

SLACK_URL = 'https://hooks.slack.com/services/'


class Blocks:
    @staticmethod
    def section(text):
        return {'type': 'section', 'text': {'type': 'mrkdwn', 'text': text}}

    @staticmethod
    def header(text):
        return {'type': 'header', 'text': {'type': 'plain_text', 'text': text, 'emoji': True}}


def verify_blocks(report: dict, duration: float) -> List[dict]:
    blocks = [
        Blocks.header(f'Verification at ell={report["ell"]} finished'),
        Blocks.section(f'Duration: {duration:.2f} seconds, seed {report["seed"]}'),
    ]
    for suite in report['suites']:
        failed = [c for c in suite['cases'] if not c['pass']]
        status = 'PASS' if not failed else f'FAIL ({len(failed)} of {len(suite["cases"])})'
        text = f'*{suite["name"]}*: {status}'
        if failed:
            text += f'\nfirst witness: `{failed[0]["property"]}`: {failed[0]["witness"]}'
        blocks.append(Blocks.section(text))
    return blocks


def send_slack_post(secret, blocks: List[dict]) -> requests.Response:
    return requests.post(f'{SLACK_URL}{secret}', json={'blocks': blocks})
