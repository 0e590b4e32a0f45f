using Microsoft.AspNetCore.Http;
using Microsoft.AspNetCore.Mvc;
using DocVault.Storage;

namespace DocVault.Api;

[ApiController]
[Route("api/documents")]
public sealed class DocumentsController : ControllerBase
{
    private readonly DocumentStore _store;
    private readonly ThumbnailService _thumbs;

    public DocumentsController(DocumentStore store, ThumbnailService thumbs)
    {
        _store = store;
        _thumbs = thumbs;
    }

    [HttpPost]
    public IActionResult Upload(IFormFile file, [FromForm] string metadata)
    {
        var meta = MetadataCodec.Decode(metadata);
        var saved = _store.Save(file.FileName, file.OpenReadStream());
        _thumbs.Render(saved, 128);
        return Ok(new { saved, title = meta?.Title });
    }

    [HttpGet("{name}")]
    public IActionResult Download(string name)
    {
        if (!_store.Exists(name)) return NotFound();
        return File(_store.Load(name), "application/octet-stream", name);
    }
}
