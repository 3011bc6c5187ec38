import logging, re
from json.decoder import JSONDecodeError
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union
from xml.etree import ElementTree

from requests import Session
from requests.exceptions import RequestException

from sentgraph.exceptions import NotFound, ParseError, RateLimited, SentGraphException, Unauthorized
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)

base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils"
WHITESPACE = re.compile(r"\s+")


class PubMedCentralAPI:
    """ Raw client for the `NCBI E-utilities <https://www.ncbi.nlm.nih.gov/books/NBK25501/>`__ of the PubMed Central
        database, used to build corpora of open-access articles whose abstracts serve as reference summaries.

        Parameters:
            api_key (Optional[str]): NCBI API Key.
            email (Optional[str]): Contact e-mail sent with every request.
            tool (str): Tool name sent with every request.
            session (Optional[Session]): :class:`requests.Session` object.

        Attributes:
            api_key (str): NCBI API Key.
            email (str): Contact e-mail.
            response (Response): Most recent full :class:`requests.Response` object.
    """
    def __init__(self, api_key: Optional[str] = None, email: Optional[str] = None, tool: str = "sentgraph",
                 session: Optional[Session] = None):
        self.api_key = api_key
        self.email = email
        self.tool = tool
        self._session = Session() if session is None else session
        self.response = None

    def _get(self, path, json=False, **kwargs):
        """ process get request. """
        return self._request(path, json=json, **kwargs)

    def _request(self, path, json=False, **kwargs):
        """ process request. """
        url_params = {"tool": self.tool}
        if self.api_key:
            url_params["api_key"] = self.api_key
        if self.email:
            url_params["email"] = self.email
        for key, value in kwargs.items():
            if value is not None:
                url_params[key] = ",".join(str(v) for v in value) if isinstance(value, (list, tuple)) else value
        request_url = f"{base_url}{path}"
        logger.debug(f"Request URL: {request_url}")
        logger.debug(f"Request Params: {({k: v for k, v in url_params.items() if k != 'api_key'})}")
        try:
            self.response = self._session.get(request_url, params=url_params)
            content = self.response.json() if json and self.response.status_code < 400 else self.response.text
        except (RequestException, JSONDecodeError) as e:
            raise SentGraphException(f"Failed to Connect to {request_url}: {e}")
        logger.debug(f"Response ({self.response.status_code} [{self.response.reason}])")
        if self.response.status_code in (401, 403):
            raise Unauthorized(f"({self.response.status_code} [{self.response.reason}]) Invalid NCBI API Key")
        elif self.response.status_code == 404:
            raise NotFound(f"({self.response.status_code} [{self.response.reason}]) Requested Item Not Found")
        elif self.response.status_code == 429:
            raise RateLimited(f"({self.response.status_code} [{self.response.reason}]) Request rate exceeded, "
                              f"use an NCBI API Key or retry later")
        elif self.response.status_code >= 400:
            raise SentGraphException(f"({self.response.status_code} [{self.response.reason}]) {content}")
        elif json and "error" in content.get("esearchresult", content):
            raise SentGraphException(content.get("esearchresult", content)["error"])
        return content

    def esearch(self, term: str, retmax: int = 20, retstart: int = 0) -> Dict:
        """ `ESearch <https://www.ncbi.nlm.nih.gov/books/NBK25499/#chapter4.ESearch>`__

            Search PubMed Central and return the matching IDs.

            Parameters:
                term (str): Entrez query, e.g. ``"pulmonary hypertension AND open access[filter]"``.
                retmax (int): Maximum number of IDs returned.
                retstart (int): Index of the first returned ID.
        """
        return self._get("/esearch.fcgi", json=True, db="pmc", term=term, retmax=retmax, retstart=retstart, retmode="json")

    def search_ids(self, term: str, retmax: int = 20, retstart: int = 0) -> List[str]:
        """ PMC IDs matching ``term``, see :meth:`esearch`. """
        return [str(i) for i in self.esearch(term, retmax=retmax, retstart=retstart)["esearchresult"].get("idlist", [])]

    def efetch(self, ids: Sequence[Union[str, int]]) -> str:
        """ `EFetch <https://www.ncbi.nlm.nih.gov/books/NBK25499/#chapter4.EFetch>`__

            Fetch the full-text XML of PubMed Central articles.

            Parameters:
                ids (Sequence[Union[str, int]]): PMC IDs, with or without the ``PMC`` prefix.
        """
        return self._get("/efetch.fcgi", db="pmc", id=[str(i).upper().replace("PMC", "") for i in ids], retmode="xml")

    def fetch_articles(self, ids: Sequence[Union[str, int]], batch_size: int = 50) -> List[Dict[str, str]]:
        """ Fetches and parses articles in batches, see :func:`parse_articles`. """
        articles = []
        for start in range(0, len(ids), batch_size):
            articles.extend(parse_articles(self.efetch(ids[start:start + batch_size])))
        return articles


def _text(element) -> str:
    return WHITESPACE.sub(" ", "".join(element.itertext())).strip()


def _paragraphs(element) -> List[str]:
    if element is None:
        return []
    paragraphs = [_text(p) for p in element.iter("p")]
    if not paragraphs:
        paragraphs = [_text(element)]
    return [p for p in paragraphs if p]


def parse_articles(xml: str) -> List[Dict[str, str]]:
    """ Extracts ``{"doc_id", "title", "abstract", "body"}`` from a PMC article set.

        ``doc_id`` is ``PMC<id>``; abstract and body paragraphs are separated by blank lines. Articles without
        an abstract or a body are skipped with a warning.

        Raises:
            :class:`~sentgraph.exceptions.ParseError`: When ``xml`` is not well-formed.
    """
    try:
        root = ElementTree.fromstring(xml)
    except ElementTree.ParseError as e:
        raise ParseError(f"malformed PMC XML: {e}", line=e.position[0] if e.position else None)
    articles = []
    for article in root.iter("article"):
        pmcid = None
        for article_id in article.iter("article-id"):
            if article_id.get("pub-id-type") in ("pmc", "pmcid"):
                pmcid = article_id.text.strip().upper().replace("PMC", "")
                break
        if not pmcid:
            logger.warning("Skipping an article without a PMC ID")
            continue
        doc_id = f"PMC{pmcid}"
        title = article.find(".//front//article-title")
        abstracts = article.findall(".//front//abstract")
        abstract = next((a for a in abstracts if a.get("abstract-type") is None), abstracts[0] if abstracts else None)
        abstract_paragraphs = _paragraphs(abstract)
        body_paragraphs = _paragraphs(article.find("body"))
        if not abstract_paragraphs or not body_paragraphs:
            logger.warning(f"Skipping {doc_id}: {'no abstract' if not abstract_paragraphs else 'no body'}")
            continue
        articles.append({
            "doc_id": doc_id,
            "title": _text(title) if title is not None else "",
            "abstract": "\n\n".join(abstract_paragraphs),
            "body": "\n\n".join(body_paragraphs)
        })
    return articles


def write_corpus(articles: Sequence[Dict[str, str]], directory: Union[str, Path]) -> List[Path]:
    """ Writes every article as ``<doc_id>.txt`` (body) and ``<doc_id>.ref.txt`` (abstract).

        Returns:
            List[Path]: Written document files.
    """
    directory = Path(directory)
    written = []
    for article in articles:
        document = directory / f"{article['doc_id']}.txt"
        atomic_write(document, article["body"] + "\n")
        atomic_write(directory / f"{article['doc_id']}.ref.txt", article["abstract"] + "\n")
        written.append(document)
    logger.info(f"Wrote {len(written)} articles to {directory}")
    return written
